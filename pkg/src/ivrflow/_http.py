"""Minimal JSON-over-HTTP POST used by the remote backend adapters."""

import json
import urllib.error
import urllib.request


class HttpFailure(Exception):
    def __init__(self, reason, status=None):
        self.status = status
        super().__init__(reason)


class BadReply(HttpFailure):
    """The server answered 200 but the body is not a JSON object."""


def post_json(endpoint, path, body, timeout=5.0):
    """POST ``body`` as UTF-8 JSON to ``endpoint + path``; return the decoded reply.

    Any transport problem, non-200 status or undecodable reply raises
    :class:`HttpFailure`.
    """
    url = endpoint.rstrip("/") + path
    data = json.dumps(body, ensure_ascii=False).encode("utf-8")
    req = urllib.request.Request(
        url, data=data, method="POST",
        headers={"Content-Type": "application/json; charset=utf-8"},
    )
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            status = resp.status
            payload = resp.read()
    except urllib.error.HTTPError as exc:
        raise HttpFailure(f"HTTP {exc.code}", status=exc.code) from exc
    except (urllib.error.URLError, OSError, TimeoutError) as exc:
        raise HttpFailure(f"unreachable: {exc}") from exc
    if status != 200:
        raise HttpFailure(f"HTTP {status}", status=status)
    try:
        reply = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadReply("reply is not JSON") from exc
    if not isinstance(reply, dict):
        raise BadReply("reply is not a JSON object")
    return reply
