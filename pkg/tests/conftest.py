"""Shared fixtures: a small handcrafted demo corpus."""

import json

import pytest

DEMO_EVENTS = [
    # Question 100: three body versions plus a title history.
    {
        "postId": 100, "postTypeId": 1, "postHistoryId": 1001, "postHistoryTypeId": 1,
        "creationDate": "2017-01-01T10:00:00Z", "userId": 7, "parentId": None,
        "text": "How do I frobnicate?",
    },
    {
        "postId": 100, "postTypeId": 1, "postHistoryId": 1002, "postHistoryTypeId": 2,
        "creationDate": "2017-01-01T10:00:00Z", "userId": 7, "parentId": None,
        "text": "I tried this:\n\n    frob(x);\n    frob(y);\n\n"
                "but it fails. See https://docs.example.org/frob?v=1#usage for details.",
    },
    {
        "postId": 100, "postTypeId": 1, "postHistoryId": 1003, "postHistoryTypeId": 5,
        "creationDate": "2017-01-02T09:30:00Z", "userId": 8, "parentId": None,
        "text": "I tried this:\n\n    frob(x);\n    frob(y);\n    frob(z);\n\n"
                "but it fails. See https://docs.example.org/frob?v=1#usage for details.",
    },
    {
        "postId": 100, "postTypeId": 1, "postHistoryId": 1004, "postHistoryTypeId": 4,
        "creationDate": "2017-01-02T09:31:00Z", "userId": 8, "parentId": None,
        "text": "How do I frobnicate quickly?",
    },
    {
        "postId": 100, "postTypeId": 1, "postHistoryId": 1005, "postHistoryTypeId": 5,
        "creationDate": "2017-01-03T08:00:00Z", "userId": 7, "parentId": None,
        "text": "I tried this variant:\n\n    frob(x);\n    frob(y);\n    frob(z);\n\n"
                "but it fails. See [the docs](https://docs.example.org/frob?v=2) instead.",
    },
    # Answer 200 to question 100: fenced code, two versions.
    {
        "postId": 200, "postTypeId": 2, "postHistoryId": 2001, "postHistoryTypeId": 2,
        "creationDate": "2017-01-01T11:00:00Z", "userId": 9, "parentId": 100,
        "text": "Use the builtin:\n\n```\nresult = frobnicate(x, fast=True)\nprint(result)\n```",
    },
    {
        "postId": 200, "postTypeId": 2, "postHistoryId": 2002, "postHistoryTypeId": 5,
        "creationDate": "2017-01-04T16:20:00Z", "userId": 9, "parentId": 100,
        "text": "Use the builtin:\n\n```\nresult = frobnicate(x, fast=True)\nreturn result\n```",
    },
    # Question 300: single version, one text block only; plus an ignored tag edit.
    {
        "postId": 300, "postTypeId": 1, "postHistoryId": 3001, "postHistoryTypeId": 2,
        "creationDate": "2017-02-01T00:00:00Z", "userId": None, "parentId": None,
        "text": "Is frobnication idempotent in every configuration?",
    },
    {
        "postId": 300, "postTypeId": 1, "postHistoryId": 3002, "postHistoryTypeId": 6,
        "creationDate": "2017-02-01T00:05:00Z", "userId": None, "parentId": None,
        "text": "<frobnication>",
    },
]


@pytest.fixture
def demo_events_file(tmp_path):
    path = tmp_path / "demo_events.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for record in DEMO_EVENTS:
            fh.write(json.dumps(record) + "\n")
    return path
