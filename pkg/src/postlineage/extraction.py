"""Split Markdown post versions into text and code blocks; extract URLs.

Recognized code notations, in precedence order when a line could open more
than one: stack snippets (``<!-- begin snippet -->`` ... ``<!-- end
snippet -->``), snippet language tags (``<!-- language: ... -->``), fenced
blocks (three backticks), ``<pre>``/``<pre><code>`` HTML, ``<script>``
HTML, four-space (or tab) indentation, and a line whose entire content is a
single backtick-framed inline-code span.  Inline code inside prose stays in
the surrounding text block.

Indented lines only open a code block when preceded by a blank line, the
start of the post, or another notation boundary; an indented line directly
after prose is treated as a lazy continuation of the paragraph (list items
and the like).  Adjacent blocks of the same type are merged and blocks
containing only whitespace are dropped, so the result alternates between
text and code.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from urllib.parse import urlsplit

logger = logging.getLogger(__name__)

TEXT = "text"
CODE = "code"

_FENCE = re.compile(r"^\s{0,3}```")
_SNIPPET_BEGIN = re.compile(r"^\s*<!--\s*begin\s+snippet\b.*-->\s*$", re.IGNORECASE)
_SNIPPET_END = re.compile(r"^\s*<!--\s*end\s+snippet\s*-->\s*$", re.IGNORECASE)
_LANGUAGE_TAG = re.compile(r"^\s*<!--\s*language(-all)?\s*:.*-->\s*$", re.IGNORECASE)
_PRE_OPEN = re.compile(r"<pre\b[^>]*>", re.IGNORECASE)
_PRE_CLOSE = re.compile(r"</pre\s*>", re.IGNORECASE)
_SCRIPT_OPEN = re.compile(r"<script\b[^>]*>", re.IGNORECASE)
_SCRIPT_CLOSE = re.compile(r"</script\s*>", re.IGNORECASE)
_CODE_TAG = re.compile(r"</?code\b[^>]*>", re.IGNORECASE)
_INLINE_CODE_LINE = re.compile(r"^\s*`([^`]+)`\s*$")


@dataclass
class PostBlock:
    """One text or code block of a post version."""

    block_type: str  # "text" | "code"
    local_id: int
    content: str

    @property
    def line_count(self) -> int:
        return len(self.content.split("\n"))


@dataclass
class LinkInfo:
    """One URL found in a text block."""

    url: str
    link_type: str  # bare | markdown | html
    position: str  # top | middle | end
    root_domain: str
    query: str | None = None
    fragment: str | None = None


@dataclass
class _Segment:
    kind: str  # text | code
    blanks_before: int = 0
    lines: list[str] = field(default_factory=list)


def _is_indented(line: str) -> bool:
    # A tab counts as the four-space indent.
    return line.startswith("    ") or line.startswith("\t")


def _strip_indent(line: str) -> str:
    if line.startswith("    "):
        return line[4:]
    if line.startswith("\t"):
        return line[1:]
    return line


def extract_segments(markdown: str) -> tuple[list[_Segment], list[tuple[str, str]], list[str]]:
    """Classify every line and build raw text/code segments.

    Returns ``(segments, line_records, warnings)``.  ``line_records`` pairs
    every input line with its role (``text``, ``code``, ``marker``, or
    ``blank``), in order, so no input line is silently dropped.
    """
    lines = markdown.split("\n")
    segments: list[_Segment] = []
    records: list[tuple[str, str]] = []
    warnings: list[str] = []

    i = 0
    n = len(lines)
    # True at positions where an indented line may open a code block.
    code_start_ok = True
    # Set by a language tag: the next block is code even without a blank line.
    forced_code = False
    pending_blanks = 0

    def open_segment(kind: str) -> _Segment:
        nonlocal pending_blanks
        seg = _Segment(kind, blanks_before=pending_blanks)
        pending_blanks = 0
        segments.append(seg)
        return seg

    while i < n:
        line = lines[i]

        if _SNIPPET_BEGIN.match(line):
            records.append((line, "marker"))
            seg = open_segment(CODE)
            i += 1
            terminated = False
            while i < n:
                inner = lines[i]
                if _SNIPPET_END.match(inner):
                    records.append((inner, "marker"))
                    i += 1
                    terminated = True
                    break
                if _LANGUAGE_TAG.match(inner):
                    records.append((inner, "marker"))
                else:
                    records.append((inner, "code"))
                    seg.lines.append(_strip_indent(inner))
                i += 1
            if not terminated:
                warnings.append("unterminated stack snippet; rest of post treated as code")
            code_start_ok = True
            forced_code = False
            continue

        if _LANGUAGE_TAG.match(line):
            records.append((line, "marker"))
            forced_code = True
            code_start_ok = True
            i += 1
            continue

        if _FENCE.match(line):
            records.append((line, "marker"))
            seg = open_segment(CODE)
            i += 1
            terminated = False
            while i < n:
                inner = lines[i]
                if _FENCE.match(inner):
                    records.append((inner, "marker"))
                    i += 1
                    terminated = True
                    break
                records.append((inner, "code"))
                seg.lines.append(inner)
                i += 1
            if not terminated:
                warnings.append("unterminated code fence; rest of post treated as code")
            code_start_ok = True
            forced_code = False
            continue

        if _PRE_OPEN.search(line) or _SCRIPT_OPEN.search(line):
            is_pre = bool(_PRE_OPEN.search(line))
            open_re = _PRE_OPEN if is_pre else _SCRIPT_OPEN
            close_re = _PRE_CLOSE if is_pre else _SCRIPT_CLOSE
            seg = open_segment(CODE)

            def strip_markup(s: str) -> str:
                s = open_re.sub("", s)
                s = close_re.sub("", s)
                if is_pre:
                    s = _CODE_TAG.sub("", s)
                return s

            terminated = False
            first = True
            while i < n:
                inner = lines[i]
                closes = bool(close_re.search(inner))
                content = strip_markup(inner)
                boundary = first or closes
                if boundary and not content.strip():
                    records.append((inner, "marker"))
                else:
                    records.append((inner, "code"))
                    seg.lines.append(content)
                first = False
                i += 1
                if closes:
                    terminated = True
                    break
            if not terminated:
                warnings.append("unterminated HTML code block; rest of post treated as code")
            code_start_ok = True
            forced_code = False
            continue

        if line.strip() and _is_indented(line) and (code_start_ok or forced_code):
            seg = open_segment(CODE)
            while i < n:
                inner = lines[i]
                if inner.strip() and _is_indented(inner):
                    records.append((inner, "code"))
                    seg.lines.append(_strip_indent(inner))
                    i += 1
                elif not inner.strip():
                    # A blank run stays inside the block when more indented
                    # code follows it.
                    j = i
                    while j < n and not lines[j].strip():
                        j += 1
                    if j < n and lines[j].strip() and _is_indented(lines[j]):
                        for k in range(i, j):
                            records.append((lines[k], "code"))
                            seg.lines.append("")
                        i = j
                    else:
                        break
                else:
                    break
            code_start_ok = True
            forced_code = False
            continue

        if not line.strip():
            records.append((line, "blank"))
            pending_blanks += 1
            code_start_ok = True
            i += 1
            continue

        forced_code = False
        inline = _INLINE_CODE_LINE.match(line)
        if inline:
            seg = open_segment(CODE)
            seg.lines.append(inline.group(1))
            records.append((line, "code"))
            code_start_ok = True
            i += 1
            continue

        # Plain prose; runs until the next blank line or notation.
        if segments and segments[-1].kind == TEXT and records and records[-1][1] == "text":
            seg = segments[-1]
        else:
            seg = open_segment(TEXT)
        seg.lines.append(line)
        records.append((line, "text"))
        code_start_ok = False
        i += 1

    for w in warnings:
        logger.warning("%s", w)
    return segments, records, warnings


def _merge_segments(segments: list[_Segment]) -> list[PostBlock]:
    """Merge adjacent same-type segments and drop whitespace-only blocks.

    Blank lines between two text segments are paragraph breaks and stay
    inside the merged text block; blank lines at code boundaries are
    notation separators and are dropped.
    """
    blocks: list[PostBlock] = []
    for seg in segments:
        if blocks and blocks[-1].block_type == seg.kind:
            gap = [""] * seg.blanks_before if seg.kind == TEXT else []
            blocks[-1].content = "\n".join([blocks[-1].content, *gap, *seg.lines])
        else:
            blocks.append(PostBlock(seg.kind, 0, "\n".join(seg.lines)))

    cleaned: list[PostBlock] = []
    for block in blocks:
        lines = block.content.split("\n")
        while lines and not lines[0].strip():
            lines.pop(0)
        while lines and not lines[-1].strip():
            lines.pop()
        if not lines:
            continue
        content = "\n".join(lines)
        if cleaned and cleaned[-1].block_type == block.block_type:
            cleaned[-1].content += "\n" + content
        else:
            cleaned.append(PostBlock(block.block_type, 0, content))
    for idx, block in enumerate(cleaned, start=1):
        block.local_id = idx
    return cleaned


def extract_blocks(markdown: str) -> list[PostBlock]:
    """Ordered text/code blocks of one Markdown post version."""
    segments, _, _ = extract_segments(markdown)
    return _merge_segments(segments)


# ---------------------------------------------------------------------------
# URL extraction
# ---------------------------------------------------------------------------

_MARKDOWN_LINK = re.compile(r"\[[^\]]*\]\(\s*(https?://[^)\s]+)(?:\s+\"[^\"]*\")?\s*\)")
_HTML_ANCHOR = re.compile(r"<a\s[^>]*href\s*=\s*[\"'](https?://[^\"']+)[\"']", re.IGNORECASE)
_BARE_URL = re.compile(r"https?://[^\s<>\"']+")
_TRAILING_PUNCT = ".,;:!?"


def _parse_url(raw: str) -> tuple[str, str, str | None, str | None] | None:
    """Return (url, root_domain, query, fragment) or None when malformed."""
    try:
        parts = urlsplit(raw)
    except ValueError:
        return None
    if parts.scheme not in ("http", "https") or not parts.netloc:
        return None
    host = parts.hostname or ""
    labels = host.split(".")
    # Last two labels; a public-suffix list is deliberately not used.
    root = ".".join(labels[-2:]) if len(labels) >= 2 else host
    return raw, root, parts.query or None, parts.fragment or None


def _block_position(local_id: int, block_count: int) -> str:
    if local_id <= 1:
        return "top"
    if local_id >= block_count:
        return "end"
    return "middle"


def extract_urls(content: str, local_id: int = 1, block_count: int = 1) -> list[LinkInfo]:
    """URLs in a text block: bare, Markdown ``[label](url)``, and HTML anchors.

    ``local_id`` and ``block_count`` describe the block's location in its
    post and determine the reported link position (top, middle, or end).
    Malformed URL candidates are skipped.  Works on comment text as well.
    """
    position = _block_position(local_id, block_count)
    found: list[LinkInfo] = []
    covered: list[tuple[int, int]] = []

    for regex, link_type in ((_MARKDOWN_LINK, "markdown"), (_HTML_ANCHOR, "html")):
        for m in regex.finditer(content):
            parsed = _parse_url(m.group(1))
            if parsed is None:
                continue
            url, root, query, fragment = parsed
            found.append(LinkInfo(url, link_type, position, root, query, fragment))
            covered.append(m.span())

    for m in _BARE_URL.finditer(content):
        if any(start <= m.start() < end for start, end in covered):
            continue
        raw = m.group(0).rstrip(_TRAILING_PUNCT)
        if raw.endswith(")") and "(" not in raw:
            raw = raw[:-1].rstrip(_TRAILING_PUNCT)
        parsed = _parse_url(raw)
        if parsed is None:
            continue
        url, root, query, fragment = parsed
        found.append(LinkInfo(url, "bare", position, root, query, fragment))

    return found
