from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from hopqa import prompts
from hopqa.errors import ContractViolation, ProtocolError, TransportError
from hopqa.generator import (
    LiveGenerator,
    ScriptedGenerator,
    StubRule,
    contains_anaphor,
    substitute_anaphor,
)

QUESTION = "Who plays the wife of the producer of Here Comes the Boom in Grown Ups?"
SUB1 = "Who is the producer of Here Comes the Boom?"
SUB2 = "Who plays the wife of this producer in Grown Ups?"


# ---------------------------------------------------------------------------
# Scripted stub
# ---------------------------------------------------------------------------


def test_scripted_decompose_returns_list_verbatim():
    stub = ScriptedGenerator(
        rules=[StubRule(template="decompose", match=QUESTION, reply=[SUB1, SUB2])]
    )
    assert stub.decompose(QUESTION) == [SUB1, SUB2]


def test_unscripted_decompose_falls_back_to_identity():
    stub = ScriptedGenerator()
    assert stub.decompose("Where is Rome?") == ["Where is Rome?"]


def test_invalid_decomposition_twice_raises_protocol_error():
    stub = ScriptedGenerator(
        rules=[StubRule(template="decompose", match=QUESTION, reply="cannot do it")]
    )
    with pytest.raises(ProtocolError) as excinfo:
        stub.decompose(QUESTION)
    assert excinfo.value.raw_text == "cannot do it"
    assert stub.request_count == 2


def test_decompose_rejects_empty_question():
    with pytest.raises(ContractViolation):
        ScriptedGenerator().decompose("   ")


def test_decompose_parses_array_with_surrounding_prose():
    stub = ScriptedGenerator(
        rules=[
            StubRule(
                template="decompose",
                match="q",
                reply='Sure, here you go: ["first?", "second?"] hope that helps',
            )
        ]
    )
    assert stub.decompose("q") == ["first?", "second?"]


def test_decompose_collapses_multi_list_reply_to_first():
    stub = ScriptedGenerator(
        rules=[
            StubRule(template="decompose", match="q", reply=[["a?", "b?"], ["c?"]])
        ]
    )
    assert stub.decompose("q") == ["a?", "b?"]


def test_answer_matching_and_unknown_fallback():
    stub = ScriptedGenerator(
        rules=[
            StubRule(template="answer", contains="producer of Here", reply="Kevin James")
        ],
        unknown_answer="no idea",
    )
    assert stub.answer(SUB1, ["some context"]) == "Kevin James"
    assert stub.answer("Unmapped question?", []) == "no idea"


def test_rewrite_decision_heuristic():
    stub = ScriptedGenerator()
    history = [(SUB1, "Kevin James")]
    assert stub.rewrite_decision(SUB2, history) is True
    assert stub.rewrite_decision("Who directed Grown Ups?", history) is False
    assert stub.rewrite_decision(SUB2, []) is False


def test_rewrite_decision_scripted_override():
    stub = ScriptedGenerator(
        rules=[StubRule(template="rewrite_decision", match=SUB2, reply="No")]
    )
    assert stub.rewrite_decision(SUB2, [(SUB1, "Kevin James")]) is False


def test_rewrite_substitutes_anaphor_phrase():
    stub = ScriptedGenerator()
    history = [(SUB1, "Kevin James")]
    assert (
        stub.rewrite(SUB2, history)
        == "Who plays the wife of Kevin James in Grown Ups?"
    )


def test_rewrite_substitutes_bare_pronoun():
    stub = ScriptedGenerator()
    history = [("Who is the producer?", "Kevin James")]
    assert stub.rewrite("Where was he born?", history) == "Where was Kevin James born?"


def test_rewrite_with_nothing_to_resolve_is_identity():
    stub = ScriptedGenerator()
    question = "Who directed Grown Ups?"
    assert stub.rewrite(question, [("x", "y")]) == question


def test_integrate_defaults_to_last_answer():
    stub = ScriptedGenerator()
    steps = [(SUB1, "Kevin James"), (SUB2, "Maria Bello")]
    assert stub.integrate(QUESTION, steps) == "Maria Bello"
    assert stub.integrate(QUESTION, steps[:1]) == "Kevin James"
    assert stub.integrate(QUESTION, []) == "unknown"


def test_integrate_scripted_reply_wins():
    stub = ScriptedGenerator(
        rules=[StubRule(template="integrate", match=QUESTION, reply="Someone Else")]
    )
    assert stub.integrate(QUESTION, [(SUB1, "Kevin James")]) == "Someone Else"


def test_extract_entities_defaults_to_empty():
    stub = ScriptedGenerator()
    assert stub.extract_entities("Who is Kevin James?") == []
    scripted = ScriptedGenerator(
        rules=[
            StubRule(
                template="extract_entities",
                match="Who is Kevin James?",
                reply=["Kevin James"],
            )
        ]
    )
    assert scripted.extract_entities("Who is Kevin James?") == ["Kevin James"]


def test_stub_replies_are_reproducible():
    stub = ScriptedGenerator(
        rules=[StubRule(template="answer", contains="Rome", reply="The Colosseum")]
    )
    first = stub.answer("What does Rome host?", ["ctx"])
    for _ in range(3):
        assert stub.answer("What does Rome host?", ["ctx"]) == first


def test_anaphor_helpers():
    assert contains_anaphor("what about this?")
    assert contains_anaphor("Did he leave?")
    assert not contains_anaphor("their theme is theirs")  # no standalone match
    assert substitute_anaphor("ask this man", "Bob") == "ask Bob"
    assert substitute_anaphor("ask them all", "Bob") == "ask them all"  # not an anaphor token
    assert substitute_anaphor("did she go", "Ada") == "did Ada go"


def test_prompt_fill_contract():
    with pytest.raises(ContractViolation):
        prompts.fill("decompose")
    with pytest.raises(ContractViolation):
        prompts.fill("no_such_template", question="x")
    filled = prompts.fill("decompose", question="Where is Rome?")
    assert "Where is Rome?" in filled


def test_bad_stub_rule_rejected():
    with pytest.raises(ContractViolation):
        ScriptedGenerator.from_script({"rules": [{"template": "answer"}]})


# ---------------------------------------------------------------------------
# Live HTTP backend against a local server
# ---------------------------------------------------------------------------


class _Recorder:
    def __init__(self, replies):
        self.replies = list(replies)
        self.requests: list[dict] = []
        self.headers: list[dict] = []


def _make_handler(recorder: _Recorder):
    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length)) if length else {}
            recorder.requests.append(body)
            recorder.headers.append(dict(self.headers))
            status, payload = (
                recorder.replies.pop(0) if recorder.replies else (500, {})
            )
            data = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def log_message(self, *args):
            pass

    return Handler


@pytest.fixture()
def local_server():
    servers = []

    def start(replies):
        recorder = _Recorder(replies)
        server = HTTPServer(("127.0.0.1", 0), _make_handler(recorder))
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        servers.append(server)
        url = f"http://127.0.0.1:{server.server_address[1]}/v1/chat/completions"
        return url, recorder

    yield start
    for server in servers:
        server.shutdown()
        server.server_close()


def _chat_reply(content: str) -> dict:
    return {"choices": [{"message": {"content": content}}]}


def test_live_backend_success_and_wire_format(local_server):
    url, recorder = local_server([(200, _chat_reply('["sub one?", "sub two?"]'))])
    live = LiveGenerator(
        endpoint_url=url, model="answerer", decompose_model="decomposer",
        api_key="sekrit", temperature=0.0,
    )
    assert live.decompose("Where is Rome?") == ["sub one?", "sub two?"]
    (body,) = recorder.requests
    assert body["model"] == "decomposer"
    assert body["temperature"] == 0.0
    assert body["messages"][0]["role"] == "user"
    assert "Where is Rome?" in body["messages"][0]["content"]
    assert recorder.headers[0].get("Authorization") == "Bearer sekrit"


def test_live_backend_uses_answer_model_for_other_templates(local_server):
    url, recorder = local_server([(200, _chat_reply("Kevin James"))])
    live = LiveGenerator(endpoint_url=url, model="answerer", decompose_model="dec")
    assert live.answer("Who produced it?", ["context passage"]) == "Kevin James"
    assert recorder.requests[0]["model"] == "answerer"
    assert "context passage" in recorder.requests[0]["messages"][0]["content"]


def test_live_backend_retries_transport_error_once(local_server):
    url, recorder = local_server(
        [(500, {}), (200, _chat_reply('["only sub?"]'))]
    )
    live = LiveGenerator(endpoint_url=url, model="m")
    assert live.decompose("q?") == ["only sub?"]
    assert len(recorder.requests) == 2


def test_live_backend_gives_up_after_second_transport_error(local_server):
    url, recorder = local_server([(500, {}), (500, {})])
    live = LiveGenerator(endpoint_url=url, model="m")
    with pytest.raises(TransportError):
        live.decompose("q?")
    assert len(recorder.requests) == 2


def test_live_backend_unreachable_endpoint(local_server):
    live = LiveGenerator(
        endpoint_url="http://127.0.0.1:9/never", model="m", timeout=0.5
    )
    with pytest.raises(TransportError):
        live.answer("q?", [])


def test_live_backend_prose_reply_twice_is_protocol_error(local_server):
    url, recorder = local_server(
        [(200, _chat_reply("prose")), (200, _chat_reply("more prose"))]
    )
    live = LiveGenerator(endpoint_url=url, model="m")
    with pytest.raises(ProtocolError) as excinfo:
        live.decompose("q?")
    assert excinfo.value.raw_text == "more prose"
    assert len(recorder.requests) == 2


def test_live_backend_malformed_body_is_protocol_error(local_server):
    url, _ = local_server([(200, {"nope": True}), (200, {"nope": True})])
    live = LiveGenerator(endpoint_url=url, model="m")
    with pytest.raises(ProtocolError):
        live.answer("q?", [])


def test_live_embed_endpoint(local_server):
    url, recorder = local_server(
        [(200, {"data": [{"embedding": [0.25, -0.5, 1.0]}]})]
    )
    live = LiveGenerator(
        endpoint_url="http://127.0.0.1:9/unused",
        model="m",
        embed_endpoint_url=url,
        embed_model="embedder",
    )
    assert live.embed("some text") == [0.25, -0.5, 1.0]
    assert recorder.requests[0] == {"model": "embedder", "input": "some text"}
    assert LiveGenerator(endpoint_url="http://x/y", model="m").embed("t") is None


def test_live_backend_requires_endpoint_and_model():
    with pytest.raises(ContractViolation):
        LiveGenerator(endpoint_url="", model="m")
    with pytest.raises(ContractViolation):
        LiveGenerator(endpoint_url="http://x/y", model="")
