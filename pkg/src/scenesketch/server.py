"""Network front of the generation service.

Primary transport is a framed TCP protocol: each frame is a 4-byte
big-endian unsigned payload length followed by that many bytes of UTF-8
JSON. The envelope is ``{"type", "request_id", "payload"}`` with types
ping/pong/generate/generate_result/error. A WebSocket endpoint at ``/ws``
carries the identical envelopes as text frames for the browser UI, which is
also served its static assets from the same HTTP app.

Malformed input gets an error envelope and the connection stays open; a
handler thread per connection keeps responses in request order.
"""

from __future__ import annotations

import json
import logging
import socket
import socketserver
import struct
import threading
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .errors import BindFailed, GenerationFailed, ProtocolError
from .generation import (
    EncodedStroke,
    GenerateRequest,
    GenerateResponse,
    GeneratorKind,
    SketchEncoding,
    generate,
)
from .strokes import Point3

logger = logging.getLogger(__name__)

DEFAULT_PORT = 9475
MAX_FRAME_BYTES = 64 * 1024 * 1024
_LENGTH = struct.Struct(">I")


# --- framing ---

def pack_frame(payload: bytes) -> bytes:
    if len(payload) > MAX_FRAME_BYTES:
        raise ProtocolError("frame_too_large", f"{len(payload)} bytes")
    return _LENGTH.pack(len(payload)) + payload


def read_exact(sock: socket.socket, count: int) -> Optional[bytes]:
    """Read exactly ``count`` bytes or None on a clean EOF."""
    chunks = []
    remaining = count
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            return None
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket) -> Optional[bytes]:
    header = read_exact(sock, 4)
    if header is None:
        return None
    (length,) = _LENGTH.unpack(header)
    if length > MAX_FRAME_BYTES:
        raise ProtocolError("frame_too_large", f"declared {length} bytes")
    body = read_exact(sock, length)
    if body is None:
        return None
    return body


def envelope(msg_type: str, request_id: str, payload: dict) -> dict:
    return {"type": msg_type, "request_id": request_id, "payload": payload}


def encode_envelope(doc: dict) -> bytes:
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


# --- payload converters ---

def mesh_to_payload(mesh) -> dict:
    return {
        "vertices": [[float(v.x), float(v.y), float(v.z)] for v in mesh.vertices],
        "triangles": [[a, b, c] for a, b, c in mesh.triangles],
    }


def request_from_payload(payload: dict, request_id: str,
                         generator_default: GeneratorKind) -> GenerateRequest:
    if not isinstance(payload, dict):
        raise ProtocolError("bad_request", "payload must be an object")
    strokes_doc = payload.get("strokes")
    if not isinstance(strokes_doc, list) or not strokes_doc:
        raise ProtocolError("bad_request", "payload.strokes must be a non-empty array")
    strokes = []
    for i, s in enumerate(strokes_doc):
        if not isinstance(s, dict) or not isinstance(s.get("points"), list):
            raise ProtocolError("bad_request", f"strokes[{i}] needs a points array")
        pts_doc = s["points"]
        if len(pts_doc) < 2:
            raise ProtocolError("bad_request", f"strokes[{i}] needs >= 2 points")
        try:
            points = tuple(Point3(float(x), float(y), float(z)) for x, y, z in pts_doc)
        except (TypeError, ValueError):
            raise ProtocolError("bad_request", f"strokes[{i}].points must be [x,y,z] rows")
        ts_doc = s.get("timestamps", list(range(len(points))))
        if not isinstance(ts_doc, list) or len(ts_doc) != len(points):
            raise ProtocolError("bad_request",
                                f"strokes[{i}].timestamps must match points length")
        try:
            timestamps = tuple(float(t) for t in ts_doc)
        except (TypeError, ValueError):
            raise ProtocolError("bad_request", f"strokes[{i}].timestamps must be numbers")
        strokes.append(EncodedStroke(points=points, timestamps=timestamps))
    generator_name = payload.get("generator", generator_default.value)
    try:
        generator = GeneratorKind(generator_name)
    except ValueError:
        raise ProtocolError("bad_request", f"unknown generator {generator_name!r}")
    variants = payload.get("variants", 1)
    seed = payload.get("seed", 0)
    if isinstance(variants, bool) or not isinstance(variants, int):
        raise ProtocolError("bad_request", "variants must be an integer")
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ProtocolError("bad_request", "seed must be an integer")
    try:
        return GenerateRequest(
            request_id=request_id,
            encoding=SketchEncoding(strokes=tuple(strokes)),
            generator=generator,
            variants=variants,
            seed=seed,
        )
    except ValueError as exc:
        raise ProtocolError("bad_request", str(exc))


def response_to_envelope(response: GenerateResponse) -> dict:
    return envelope("generate_result", response.request_id,
                    {"meshes": [mesh_to_payload(m) for m in response.meshes]})


# --- dispatch shared by TCP and WebSocket ---

def handle_envelope(doc, generator_default: GeneratorKind) -> dict:
    """Map one inbound envelope to its reply envelope."""
    if not isinstance(doc, dict):
        return envelope("error", "", {"code": "bad_payload",
                                      "message": "envelope must be a JSON object"})
    request_id = doc.get("request_id")
    if not isinstance(request_id, str):
        return envelope("error", "", {"code": "bad_payload",
                                      "message": "request_id must be a string"})
    msg_type = doc.get("type")
    if msg_type == "ping":
        return envelope("pong", request_id, doc.get("payload") or {})
    if msg_type == "generate":
        started = time.monotonic()
        try:
            request = request_from_payload(doc.get("payload"), request_id,
                                           generator_default)
            response = generate(request)
        except ProtocolError as exc:
            return envelope("error", request_id,
                            {"code": exc.code, "message": exc.message})
        except GenerationFailed as exc:
            return envelope("error", request_id,
                            {"code": "generation_failed", "message": str(exc)})
        elapsed_ms = (time.monotonic() - started) * 1000.0
        logger.info("generate request_id=%s generator=%s variants=%d elapsed_ms=%.1f",
                    request_id, request.generator.value, request.variants, elapsed_ms)
        return response_to_envelope(response)
    return envelope("error", request_id,
                    {"code": "unsupported_type",
                     "message": f"cannot handle type {msg_type!r}"})


def handle_frame(body: bytes, generator_default: GeneratorKind) -> bytes:
    try:
        doc = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        reply = envelope("error", "", {"code": "bad_payload",
                                       "message": f"frame is not valid JSON: {exc}"})
        return encode_envelope(reply)
    return encode_envelope(handle_envelope(doc, generator_default))


# --- TCP server ---

class _ConnectionHandler(socketserver.BaseRequestHandler):
    def handle(self):
        sock: socket.socket = self.request
        generator_default = self.server.generator_default  # type: ignore[attr-defined]
        while True:
            try:
                body = read_frame(sock)
            except ProtocolError as exc:
                reply = envelope("error", "", {"code": exc.code, "message": exc.message})
                sock.sendall(pack_frame(encode_envelope(reply)))
                return  # cannot resync after an oversized declaration
            except OSError:
                return
            if body is None:
                return
            reply = handle_frame(body, generator_default)
            try:
                sock.sendall(pack_frame(reply))
            except OSError:
                return


class _ThreadingServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class GenerationServer:
    """Framed-TCP generation endpoint; one handler thread per connection."""

    def __init__(self, port: int = DEFAULT_PORT, host: str = "0.0.0.0",
                 generator_default: GeneratorKind = GeneratorKind.TUBES):
        self.host = host
        self.port = port
        self.generator_default = generator_default
        self._server: Optional[_ThreadingServer] = None
        self._thread: Optional[threading.Thread] = None

    def start(self) -> int:
        """Bind and serve on a background thread; returns the bound port."""
        try:
            self._server = _ThreadingServer((self.host, self.port), _ConnectionHandler)
        except OSError as exc:
            raise BindFailed(f"cannot bind {self.host}:{self.port}: {exc}")
        self._server.generator_default = self.generator_default  # type: ignore[attr-defined]
        self.port = self._server.server_address[1]
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        name="generation-server", daemon=True)
        self._thread.start()
        logger.info("generation server listening on %s:%d", self.host, self.port)
        return self.port

    def serve_forever(self):
        if self._server is None:
            self.start()
        assert self._thread is not None
        self._thread.join()

    def stop(self):
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None


# --- scripted client (used by the CLI, tests, and tooling) ---

class FramedClient:
    """Minimal synchronous client for the framed TCP protocol."""

    def __init__(self, host: str, port: int, timeout: float = 10.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)

    def close(self):
        self.sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def send_raw(self, data: bytes):
        self.sock.sendall(data)

    def send(self, doc: dict):
        self.sock.sendall(pack_frame(encode_envelope(doc)))

    def recv_raw(self) -> bytes:
        body = read_frame(self.sock)
        if body is None:
            raise ConnectionError("server closed the connection")
        return body

    def recv(self) -> dict:
        return json.loads(self.recv_raw().decode("utf-8"))

    def roundtrip(self, doc: dict) -> dict:
        self.send(doc)
        return self.recv()


# --- WebSocket + static assets ---

def build_http_app(generator_default: GeneratorKind = GeneratorKind.TUBES,
                   static_dir: Optional[str | Path] = None) -> FastAPI:
    """FastAPI app exposing /ws with the JSON envelope protocol and, when
    available, the compiled browser UI as static files."""
    app = FastAPI(title="scenesketch generation service")

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        try:
            while True:
                text = await ws.receive_text()
                try:
                    doc = json.loads(text)
                except json.JSONDecodeError as exc:
                    reply = envelope("error", "", {
                        "code": "bad_payload",
                        "message": f"frame is not valid JSON: {exc}"})
                else:
                    reply = handle_envelope(doc, generator_default)
                await ws.send_text(json.dumps(reply, separators=(",", ":")))
        except WebSocketDisconnect:
            return

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app
