"""Streaming scoring protocol: line-delimited JSON over stdin/stdout.

Requests are ``{"id": ..., "image_path": ...}``, one per line; every request
line gets exactly one response line, either ``{"id": ..., "score": ...}`` or
an error object. Malformed lines produce error responses, never silent drops
or crashes.
"""

from __future__ import annotations

import json
from typing import IO

from .model import BaselineModel, score_image
from .features import load_image


def handle_line(line: str, model: BaselineModel, tta: str) -> dict:
    try:
        request = json.loads(line)
    except json.JSONDecodeError as exc:
        return {"error": f"malformed request: {exc}"}
    if not isinstance(request, dict) or "id" not in request:
        return {"error": "request must be an object with an 'id' field"}
    item_id = request["id"]
    path = request.get("image_path")
    if not path:
        return {"id": item_id, "error": "missing image_path"}
    try:
        image = load_image(path)
    except OSError as exc:
        return {"id": item_id, "error": f"unreadable image: {exc}"}
    try:
        return {"id": item_id, "score": score_image(model, image, tta)}
    except Exception as exc:  # scoring must never kill the stream
        return {"id": item_id, "error": f"scoring failed: {exc}"}


def serve_stream(model: BaselineModel, stdin: IO[str], stdout: IO[str], tta: str = "off") -> int:
    """Process requests until EOF; returns the number of lines handled."""
    handled = 0
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        response = handle_line(line, model, tta)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
        handled += 1
    return handled
