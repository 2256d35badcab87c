"""Local HTTP backend for ground-truth annotation.

Serves post version pairs side by side, precomputes the automatic
connections (blocks with equal content and type that are unique in both
versions), accepts full connection sets per pair, stores per-block
comments, exposes the computed mapping with disagreement flags, and
exports the ground-truth file.

All payloads are JSON; numeric ids travel as decimal strings so browser
clients never lose 64-bit precision.  Reads run concurrently; writes are
serialized and persisted atomically after every change.
"""

from __future__ import annotations

import json
import mimetypes
import os
import re
import threading
from copy import deepcopy
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from .corpus_io import Corpus
from .evaluation import GroundTruth, load_ground_truth, save_ground_truth
from .history import MatchingConfig, PostVersion, default_matching_config, line_diff, process_version_history
from .textsim import metric_by_name

_ROUTES = [
    ("GET", re.compile(r"^/api/posts$"), "list_posts"),
    ("GET", re.compile(r"^/api/posts/(\d+)/versions$"), "list_versions"),
    ("GET", re.compile(r"^/api/posts/(\d+)/pairs/(\d+)$"), "get_pair"),
    ("PUT", re.compile(r"^/api/posts/(\d+)/pairs/(\d+)/connections$"), "put_connections"),
    ("POST", re.compile(r"^/api/posts/(\d+)/blocks/(\d+)/(\d+)/comment$"), "post_comment"),
    ("GET", re.compile(r"^/api/posts/(\d+)/computed$"), "get_computed"),
    ("GET", re.compile(r"^/api/export$"), "export"),
]


class AnnotationStore:
    """Ground truth and comments with atomic file persistence."""

    def __init__(self, corpus: Corpus, ground_truth_path: str | None):
        self.corpus = corpus
        self.path = Path(ground_truth_path) if ground_truth_path else None
        self.lock = threading.Lock()
        if self.path and self.path.exists():
            self.ground_truth = load_ground_truth(self.path)
        else:
            self.ground_truth = GroundTruth()
        self.comments: dict[tuple[int, int, int], str] = {}
        self.comments_path = (
            self.path.with_suffix(self.path.suffix + ".comments.json") if self.path else None
        )
        if self.comments_path and self.comments_path.exists():
            with self.comments_path.open(encoding="utf-8") as fh:
                for record in json.load(fh):
                    key = (int(record["postId"]), int(record["postHistoryId"]), int(record["localId"]))
                    self.comments[key] = record["text"]

    def _persist(self) -> None:
        if self.path is None:
            return
        save_ground_truth(self.ground_truth, _atomic_target(self.path))
        if self.comments_path is not None:
            payload = [
                {
                    "postId": post_id,
                    "postHistoryId": hid,
                    "localId": local,
                    "text": text,
                }
                for (post_id, hid, local), text in sorted(self.comments.items())
            ]
            target = _atomic_target(self.comments_path)
            with target.open("w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, ensure_ascii=False)
        _commit_atomic(self.path)
        if self.comments_path is not None:
            _commit_atomic(self.comments_path)

    def replace_pair_connections(
        self, post_id: int, cur: PostVersion, connections: dict[int, int]
    ) -> None:
        """Store the full connection set of one version pair."""
        with self.lock:
            gt = self.ground_truth
            for block in cur.blocks:
                gt.blocks.add((post_id, cur.post_history_id, block.local_id, block.block_type))
            for block_type in ("text", "code"):
                gt.connections[block_type] = {
                    c
                    for c in gt.connections[block_type]
                    if not (c[0] == post_id and c[1] == cur.post_history_id)
                }
            for block in cur.blocks:
                pred = connections.get(block.local_id)
                if pred is not None:
                    gt.connections[block.block_type].add(
                        (post_id, cur.post_history_id, block.local_id, pred)
                    )
            self._persist()

    def set_comment(self, post_id: int, hid: int, local_id: int, text: str) -> None:
        with self.lock:
            key = (post_id, hid, local_id)
            if text:
                self.comments[key] = text
            else:
                self.comments.pop(key, None)
            self._persist()

    def pair_connections(self, post_id: int, cur_hid: int) -> list[dict]:
        out = []
        for block_type in ("text", "code"):
            for (p, h, local, pred) in sorted(self.ground_truth.connections[block_type]):
                if p == post_id and h == cur_hid:
                    out.append(
                        {
                            "leftLocalId": str(pred),
                            "rightLocalId": str(local),
                            "blockType": block_type,
                        }
                    )
        return out

    def pair_annotated(self, post_id: int, cur_hid: int) -> bool:
        return any(
            p == post_id and h == cur_hid for (p, h, _, _) in self.ground_truth.blocks
        )


def _atomic_target(path: Path) -> Path:
    return path.with_suffix(path.suffix + ".tmp")


def _commit_atomic(path: Path) -> None:
    tmp = _atomic_target(path)
    if tmp.exists():
        os.replace(tmp, path)


def auto_connections(left: PostVersion, right: PostVersion) -> list[dict]:
    """Blocks with equal content and type that are unique in both versions."""
    out = []
    for block_type in ("text", "code"):
        left_counts: dict[str, list[int]] = {}
        right_counts: dict[str, list[int]] = {}
        for block in left.blocks:
            if block.block_type == block_type:
                left_counts.setdefault(block.content, []).append(block.local_id)
        for block in right.blocks:
            if block.block_type == block_type:
                right_counts.setdefault(block.content, []).append(block.local_id)
        for content, left_ids in left_counts.items():
            right_ids = right_counts.get(content, [])
            if len(left_ids) == 1 and len(right_ids) == 1:
                out.append(
                    {
                        "leftLocalId": str(left_ids[0]),
                        "rightLocalId": str(right_ids[0]),
                        "blockType": block_type,
                    }
                )
    out.sort(key=lambda c: int(c["rightLocalId"]))
    return out


def _block_payload(block) -> dict:
    return {
        "localId": str(block.local_id),
        "blockType": block.block_type,
        "content": block.content,
        "lineCount": str(block.line_count),
    }


class AnnotateHandler(BaseHTTPRequestHandler):
    server_version = "postlineage-annotate"
    corpus: Corpus
    store: AnnotationStore
    matching: MatchingConfig
    ui_dir: Path | None

    # -- plumbing ---------------------------------------------------------

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._json({"error": message}, status=status)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        if not length:
            return {}
        raw = self.rfile.read(length)
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            raise ValueError("request body is not valid JSON")

    def _dispatch(self, method: str) -> None:
        parts = urlsplit(self.path)
        for verb, pattern, name in _ROUTES:
            if verb != method:
                continue
            match = pattern.match(parts.path)
            if match:
                try:
                    getattr(self, name)(*match.groups(), query=parse_qs(parts.query))
                except ValueError as exc:
                    self._error(400, str(exc))
                except KeyError as exc:
                    self._error(404, f"not found: {exc}")
                return
        if method == "GET" and self.ui_dir is not None:
            self._serve_static(parts.path)
            return
        self._error(404, "unknown endpoint")

    def do_GET(self):
        self._dispatch("GET")

    def do_PUT(self):
        self._dispatch("PUT")

    def do_POST(self):
        self._dispatch("POST")

    def _serve_static(self, path: str) -> None:
        rel = path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._error(404, "no such file")
            return
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", mimetypes.guess_type(str(target))[0] or "application/octet-stream")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    # -- helpers ----------------------------------------------------------

    def _post(self, post_id: str) -> list[PostVersion]:
        versions = self.corpus.posts.get(int(post_id))
        if not versions:
            raise KeyError(f"post {post_id}")
        return versions

    def _pair(self, post_id: str, pair_index: str) -> tuple[PostVersion, PostVersion]:
        versions = self._post(post_id)
        index = int(pair_index)
        if index < 2 or index > len(versions):
            raise KeyError(f"pair {pair_index} of post {post_id}")
        return versions[index - 2], versions[index - 1]

    # -- endpoints --------------------------------------------------------

    def list_posts(self, query=None) -> None:
        posts = []
        for post_id in self.corpus.post_ids():
            versions = self.corpus.posts[post_id]
            annotated = sum(
                1
                for cur in versions[1:]
                if self.store.pair_annotated(post_id, cur.post_history_id)
            )
            posts.append(
                {
                    "postId": str(post_id),
                    "postTypeId": str(versions[0].post_type_id),
                    "versionCount": str(len(versions)),
                    "pairCount": str(max(0, len(versions) - 1)),
                    "annotatedPairs": str(annotated),
                }
            )
        self._json({"posts": posts})

    def list_versions(self, post_id: str, query=None) -> None:
        versions = self._post(post_id)
        self._json(
            {
                "postId": post_id,
                "versions": [
                    {
                        "postHistoryId": str(v.post_history_id),
                        "versionIndex": str(v.version_index),
                        "creationDate": v.creation_date.isoformat(),
                        "blockCount": str(len(v.blocks)),
                    }
                    for v in versions
                ],
            }
        )

    def get_pair(self, post_id: str, pair_index: str, query=None) -> None:
        left, right = self._pair(post_id, pair_index)
        pid = int(post_id)
        comments = {
            f"{hid}/{local}": text
            for (p, hid, local), text in self.store.comments.items()
            if p == pid and hid in (left.post_history_id, right.post_history_id)
        }
        connections = self.store.pair_connections(pid, right.post_history_id)
        payload = {
            "postId": post_id,
            "pairIndex": pair_index,
            "annotated": self.store.pair_annotated(pid, right.post_history_id),
            "left": {
                "postHistoryId": str(left.post_history_id),
                "blocks": [_block_payload(b) for b in left.blocks],
            },
            "right": {
                "postHistoryId": str(right.post_history_id),
                "blocks": [_block_payload(b) for b in right.blocks],
            },
            "autoConnections": auto_connections(left, right),
            "connections": connections,
            "comments": comments,
        }
        if query and query.get("diff"):
            payload["diffs"] = self._pair_diffs(left, right, connections)
        self._json(payload)

    def _pair_diffs(self, left, right, connections) -> list[dict]:
        left_by_id = {b.local_id: b for b in left.blocks}
        right_by_id = {b.local_id: b for b in right.blocks}
        out = []
        for conn in connections:
            lb = left_by_id.get(int(conn["leftLocalId"]))
            rb = right_by_id.get(int(conn["rightLocalId"]))
            if lb is None or rb is None:
                continue
            out.append(
                {
                    "leftLocalId": conn["leftLocalId"],
                    "rightLocalId": conn["rightLocalId"],
                    "ops": [
                        {"kind": op.kind, "text": op.text}
                        for op in line_diff(lb.content, rb.content)
                    ],
                }
            )
        return out

    def put_connections(self, post_id: str, pair_index: str, query=None) -> None:
        left, right = self._pair(post_id, pair_index)
        body = self._read_body()
        raw = body.get("connections")
        if not isinstance(raw, list):
            raise ValueError("body must carry a 'connections' list")
        left_by_id = {b.local_id: b for b in left.blocks}
        right_by_id = {b.local_id: b for b in right.blocks}
        mapping: dict[int, int] = {}
        used_left: set[int] = set()
        for item in raw:
            try:
                left_local = int(item["leftLocalId"])
                right_local = int(item["rightLocalId"])
            except (KeyError, TypeError, ValueError):
                raise ValueError("every connection needs leftLocalId and rightLocalId")
            lb = left_by_id.get(left_local)
            rb = right_by_id.get(right_local)
            if lb is None or rb is None:
                raise ValueError(f"no such block pair: {left_local} -> {right_local}")
            if lb.block_type != rb.block_type:
                raise ValueError(
                    f"type mismatch: {left_local} is {lb.block_type}, "
                    f"{right_local} is {rb.block_type}"
                )
            if right_local in mapping:
                raise ValueError(f"block {right_local} connected twice")
            if left_local in used_left:
                raise ValueError(f"predecessor {left_local} connected twice")
            mapping[right_local] = left_local
            used_left.add(left_local)
        self.store.replace_pair_connections(int(post_id), right, mapping)
        self._json({"ok": True, "connections": self.store.pair_connections(int(post_id), right.post_history_id)})

    def post_comment(self, post_id: str, hid: str, local_id: str, query=None) -> None:
        versions = self._post(post_id)
        version = next((v for v in versions if v.post_history_id == int(hid)), None)
        if version is None:
            raise KeyError(f"version {hid}")
        if not any(b.local_id == int(local_id) for b in version.blocks):
            raise KeyError(f"block {local_id}")
        body = self._read_body()
        text = str(body.get("text", ""))
        self.store.set_comment(int(post_id), int(hid), int(local_id), text)
        self._json({"ok": True, "text": text})

    def get_computed(self, post_id: str, query=None) -> None:
        versions = deepcopy(self._post(post_id))
        matching = self._config_from_query(query or {})
        process_version_history(versions, matching)
        pairs = []
        pid = int(post_id)
        for cur in versions[1:]:
            computed = [
                {
                    "leftLocalId": str(b.pred_local_id),
                    "rightLocalId": str(b.local_id),
                    "blockType": b.block_type,
                    "similarity": b.pred_similarity,
                    "equal": b.pred_is_equal,
                }
                for b in cur.blocks
                if b.has_pred
            ]
            saved = self.store.pair_connections(pid, cur.post_history_id)
            saved_set = {(c["leftLocalId"], c["rightLocalId"]) for c in saved}
            computed_set = {(c["leftLocalId"], c["rightLocalId"]) for c in computed}
            pairs.append(
                {
                    "pairIndex": str(cur.version_index),
                    "computed": computed,
                    "agreements": sorted(saved_set & computed_set),
                    "onlyComputed": sorted(computed_set - saved_set),
                    "onlyGroundTruth": sorted(saved_set - computed_set),
                }
            )
        self._json({"postId": post_id, "config": matching.describe(), "pairs": pairs})

    def _config_from_query(self, query: dict) -> MatchingConfig:
        def first(name):
            values = query.get(name)
            return values[0] if values else None

        base = self.matching
        kwargs = {}
        if first("simText"):
            kwargs["sim_text"] = metric_by_name(first("simText"))
        if first("thetaText"):
            kwargs["theta_text"] = float(first("thetaText"))
        if first("simCode"):
            kwargs["sim_code"] = metric_by_name(first("simCode"))
        if first("thetaCode"):
            kwargs["theta_code"] = float(first("thetaCode"))
        if not kwargs:
            return base
        from dataclasses import replace

        return replace(base, **kwargs)

    def export(self, query=None) -> None:
        import io

        with self.store.lock:
            buffer = io.StringIO()
            import csv as _csv

            writer = _csv.writer(buffer, lineterminator="\n")
            writer.writerow(["postId", "postHistoryId", "localId", "blockType", "predLocalId"])
            linked = {
                (p, h, l): pred
                for conns in self.store.ground_truth.connections.values()
                for (p, h, l, pred) in conns
            }
            for post_id, hid, local, block_type in sorted(self.store.ground_truth.blocks):
                pred = linked.get((post_id, hid, local))
                writer.writerow([post_id, hid, local, block_type, "" if pred is None else pred])
            body = buffer.getvalue().encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "text/csv; charset=utf-8")
        self.send_header("Content-Disposition", "attachment; filename=ground_truth.csv")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def create_server(
    corpus: Corpus,
    port: int = 0,
    ground_truth_path: str | None = None,
    matching_config: MatchingConfig | None = None,
    ui_dir: str | None = None,
) -> ThreadingHTTPServer:
    handler = type(
        "BoundAnnotateHandler",
        (AnnotateHandler,),
        {
            "corpus": corpus,
            "store": AnnotationStore(corpus, ground_truth_path),
            "matching": matching_config or default_matching_config(),
            "ui_dir": Path(ui_dir) if ui_dir else None,
        },
    )
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(
    corpus: Corpus,
    port: int,
    ground_truth_path: str | None = None,
    matching_config: MatchingConfig | None = None,
    ui_dir: str | None = None,
) -> int:
    try:
        server = create_server(corpus, port, ground_truth_path, matching_config, ui_dir)
    except OSError as exc:
        print(f"cannot bind port {port}: {exc}")
        return 2
    print(f"annotation backend listening on http://127.0.0.1:{server.server_port}/", flush=True)
    if ground_truth_path:
        print(f"ground truth persisted to {ground_truth_path}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0
