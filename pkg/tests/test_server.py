import json
import struct
import threading

import pytest

from scenesketch.errors import BindFailed
from scenesketch.generation import GeneratorKind
from scenesketch.server import (
    FramedClient,
    GenerationServer,
    build_http_app,
    envelope,
    handle_envelope,
    pack_frame,
)


@pytest.fixture()
def server():
    srv = GenerationServer(port=0, host="127.0.0.1")
    srv.start()
    yield srv
    srv.stop()


def stroke_payload(generator="tubes", variants=1, seed=0):
    return {
        "strokes": [
            {"points": [[0.1, 0.1, 0.1], [0.3, 0.15, 0.1], [0.35, 0.3, 0.2]],
             "timestamps": [0.0, 0.05, 0.1]},
            {"points": [[0.1, 0.3, 0.1], [0.3, 0.3, 0.3]],
             "timestamps": [0.2, 0.25]},
        ],
        "generator": generator,
        "variants": variants,
        "seed": seed,
    }


def test_ping_pong(server):
    with FramedClient("127.0.0.1", server.port) as client:
        reply = client.roundtrip(envelope("ping", "p-1", {}))
    assert reply["type"] == "pong"
    assert reply["request_id"] == "p-1"


def test_generate_returns_requested_variants(server):
    with FramedClient("127.0.0.1", server.port) as client:
        reply = client.roundtrip(envelope("generate", "g-1", stroke_payload(variants=3)))
    assert reply["type"] == "generate_result"
    assert reply["request_id"] == "g-1"
    meshes = reply["payload"]["meshes"]
    assert len(meshes) == 3
    for mesh in meshes:
        assert mesh["vertices"] and mesh["triangles"]
        assert all(len(v) == 3 for v in mesh["vertices"])


def test_malformed_frame_gets_error_and_connection_survives(server):
    with FramedClient("127.0.0.1", server.port) as client:
        client.send_raw(struct.pack(">I", 10) + b"not json!!")
        reply = client.recv()
        assert reply["type"] == "error"
        assert reply["payload"]["code"] == "bad_payload"
        # same connection still serves valid requests
        reply = client.roundtrip(envelope("ping", "after", {}))
        assert reply["type"] == "pong"


def test_oversized_variants_rejected_connection_survives(server):
    with FramedClient("127.0.0.1", server.port) as client:
        reply = client.roundtrip(envelope("generate", "g-big", stroke_payload(variants=9)))
        assert reply["type"] == "error"
        assert reply["payload"]["code"] == "bad_request"
        reply = client.roundtrip(envelope("generate", "g-ok", stroke_payload()))
        assert reply["type"] == "generate_result"


def test_generation_failure_reported(server):
    payload = {
        "strokes": [{"points": [[0.0, 0.0, 0.2], [0.1, 0.0, 0.2], [0.2, 0.1, 0.2]],
                     "timestamps": [0, 1, 2]}],
        "generator": "hull",
    }
    with FramedClient("127.0.0.1", server.port) as client:
        reply = client.roundtrip(envelope("generate", "g-flat", payload))
    assert reply["type"] == "error"
    assert reply["payload"]["code"] == "generation_failed"


def test_unsupported_type_reply(server):
    with FramedClient("127.0.0.1", server.port) as client:
        reply = client.roundtrip(envelope("generate_result", "x", {}))
    assert reply["type"] == "error"
    assert reply["payload"]["code"] == "unsupported_type"


def test_same_seed_responses_byte_identical(server):
    doc = envelope("generate", "g-det", stroke_payload(variants=4, seed=1234))
    with FramedClient("127.0.0.1", server.port) as a:
        a.send(doc)
        raw_a = a.recv_raw()
    with FramedClient("127.0.0.1", server.port) as b:
        b.send(doc)
        raw_b = b.recv_raw()
    assert raw_a == raw_b


def test_sixteen_concurrent_clients_keep_order(server):
    n_clients, n_requests = 16, 5
    failures = []

    def worker(idx):
        try:
            with FramedClient("127.0.0.1", server.port) as client:
                for k in range(n_requests):
                    rid = f"c{idx}-r{k}"
                    if k % 2 == 0:
                        reply = client.roundtrip(envelope("ping", rid, {}))
                        expected = "pong"
                    else:
                        reply = client.roundtrip(
                            envelope("generate", rid, stroke_payload(seed=idx)))
                        expected = "generate_result"
                    if reply["request_id"] != rid or reply["type"] != expected:
                        failures.append((idx, k, reply["request_id"], reply["type"]))
        except Exception as exc:  # noqa: BLE001 - surface in main thread
            failures.append((idx, "exception", repr(exc)))

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(n_clients)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=60)
    assert failures == []


def test_bind_failure_raises():
    first = GenerationServer(port=0, host="127.0.0.1")
    port = first.start()
    try:
        second = GenerationServer(port=port, host="127.0.0.1")
        with pytest.raises(BindFailed):
            second.start()
    finally:
        first.stop()


def test_handle_envelope_default_generator():
    payload = stroke_payload()
    del payload["generator"]
    doc = envelope("generate", "g", payload)
    reply = handle_envelope(doc, GeneratorKind.HULL)
    # default generator applied; hull of these strokes is non-degenerate
    assert reply["type"] == "generate_result"


def test_websocket_carries_same_envelopes():
    from fastapi.testclient import TestClient

    app = build_http_app(generator_default=GeneratorKind.TUBES)
    client = TestClient(app)
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps(envelope("ping", "w-1", {})))
        reply = json.loads(ws.receive_text())
        assert reply["type"] == "pong" and reply["request_id"] == "w-1"

        ws.send_text(json.dumps(envelope("generate", "w-2", stroke_payload(variants=2))))
        reply = json.loads(ws.receive_text())
        assert reply["type"] == "generate_result"
        assert len(reply["payload"]["meshes"]) == 2

        ws.send_text("this is not json")
        reply = json.loads(ws.receive_text())
        assert reply["type"] == "error"
        assert reply["payload"]["code"] == "bad_payload"
