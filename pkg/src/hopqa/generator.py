"""Text-generation backends: a live HTTP client and a deterministic stub.

Every backend turns high-level calls (decompose, rewrite decisions,
rewrites, sub-answers, integration, entity extraction) into a single
prompted completion, parses the reply per template, and retries a failed
request at most once before raising.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import requests

from . import prompts
from .errors import ContractViolation, ProtocolError, TransportError

History = Sequence[tuple[str, str]]

ANAPHOR_TOKENS = {"this", "that", "these", "it", "he", "she", "they"}

_ANAPHOR_PHRASE_RE = re.compile(r"\b(?:this|that|these)\s+\w+", re.IGNORECASE)
_ANAPHOR_TOKEN_RE = re.compile(
    r"\b(?:this|that|these|it|he|she|they)\b", re.IGNORECASE
)
_JSON_ARRAY_RE = re.compile(r"\[.*\]", re.DOTALL)


@dataclass(frozen=True)
class GeneratorRequest:
    template: str
    fields: dict[str, str]
    filled_prompt: str
    temperature: float = 0.0


@dataclass(frozen=True)
class GeneratorReply:
    text: str
    parsed: Any


def _render_history(history: History) -> str:
    if not history:
        return "(none)"
    lines = []
    for i, (question, answer) in enumerate(history, start=1):
        lines.append(f"{i}. Q: {question}\n   A: {answer}")
    return "\n".join(lines)


def _render_context(context_chunks: Sequence[str]) -> str:
    if not context_chunks:
        return "(no passages retrieved)"
    return "\n\n".join(
        f"[{i}] {text}" for i, text in enumerate(context_chunks, start=1)
    )


def _parse_string_array(text: str, allow_empty: bool = False) -> list[str]:
    """Parse a JSON array of strings, tolerating surrounding prose.

    An array of arrays (a multi-list reply) collapses to its first list.
    """
    candidates = [text.strip()]
    bracketed = _JSON_ARRAY_RE.search(text)
    if bracketed:
        candidates.append(bracketed.group())
    for candidate in candidates:
        try:
            data = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(data, list) and data and all(
            isinstance(item, list) for item in data
        ):
            data = data[0]
        if isinstance(data, list) and all(isinstance(item, str) for item in data):
            items = [item.strip() for item in data if item.strip()]
            if items or allow_empty:
                return items
    raise ProtocolError("reply is not a JSON array of strings", raw_text=text)


def _parse_yes_no(text: str) -> bool:
    word = text.strip().strip(".!\"'").lower()
    if word.startswith("yes"):
        return True
    if word.startswith("no"):
        return False
    raise ProtocolError("reply is not Yes or No", raw_text=text)


def _parse_short_text(text: str) -> str:
    return text.strip().strip('"').strip()


class Generator:
    """Shared request/parse/retry machinery for all backends."""

    def __init__(self, temperature: float = 0.0):
        self.temperature = temperature
        self.request_count = 0

    # Subclasses produce the raw completion text for one request.
    def _complete(self, request: GeneratorRequest) -> str:
        raise NotImplementedError

    def embed(self, text: str) -> list[float] | None:
        """Optional query-embedding hook; None means no dense query vector."""
        return None

    def _run(
        self,
        template: str,
        fields: dict[str, str],
        parse: Callable[[str], Any],
    ) -> GeneratorReply:
        request = GeneratorRequest(
            template=template,
            fields=dict(fields),
            filled_prompt=prompts.fill(template, **fields),
            temperature=self.temperature,
        )
        last_error: Exception | None = None
        for _ in range(2):
            self.request_count += 1
            try:
                text = self._complete(request)
            except TransportError as exc:
                last_error = exc
                continue
            try:
                return GeneratorReply(text=text, parsed=parse(text))
            except ProtocolError as exc:
                last_error = exc
                continue
        assert last_error is not None
        raise last_error

    def decompose(self, question: str) -> list[str]:
        if not question.strip():
            raise ContractViolation("question must be non-empty")
        reply = self._run(
            prompts.DECOMPOSE, {"question": question}, _parse_string_array
        )
        return reply.parsed

    def rewrite_decision(self, sub_question: str, history: History) -> bool:
        fields = {
            "question": sub_question,
            "history": _render_history(history),
            "last_answer": history[-1][1] if history else "",
            "history_len": str(len(history)),
        }
        return self._run(prompts.REWRITE_DECISION, fields, _parse_yes_no).parsed

    def rewrite(self, sub_question: str, history: History) -> str:
        fields = {
            "question": sub_question,
            "history": _render_history(history),
            "last_answer": history[-1][1] if history else "",
            "history_len": str(len(history)),
        }
        return self._run(prompts.REWRITE, fields, _parse_short_text).parsed

    def answer(self, sub_question: str, context_chunks: Sequence[str]) -> str:
        fields = {
            "question": sub_question,
            "context": _render_context(context_chunks),
        }
        return self._run(prompts.ANSWER, fields, _parse_short_text).parsed

    def integrate(self, question: str, steps: History) -> str:
        fields = {
            "question": question,
            "steps": _render_history(steps),
            "last_answer": steps[-1][1] if steps else "",
        }
        return self._run(prompts.INTEGRATE, fields, _parse_short_text).parsed

    def extract_entities(self, question: str) -> list[str]:
        reply = self._run(
            prompts.EXTRACT_ENTITIES,
            {"question": question},
            lambda text: _parse_string_array(text, allow_empty=True),
        )
        return reply.parsed


def contains_anaphor(text: str) -> bool:
    return bool(_ANAPHOR_TOKEN_RE.search(text))


def substitute_anaphor(text: str, replacement: str) -> str:
    """Replace the first anaphor phrase or bare pronoun with ``replacement``."""
    phrase = _ANAPHOR_PHRASE_RE.search(text)
    if phrase:
        return text[: phrase.start()] + replacement + text[phrase.end() :]
    token = _ANAPHOR_TOKEN_RE.search(text)
    if token:
        return text[: token.start()] + replacement + text[token.end() :]
    return text


@dataclass
class StubRule:
    template: str
    match: str | None = None
    contains: str | None = None
    reply: Any = None

    def matches(self, key: str) -> bool:
        if self.match is not None:
            return key == self.match
        if self.contains is not None:
            return self.contains in key
        return False


class ScriptedGenerator(Generator):
    """Offline backend driven by a JSON script of (template, matcher) rules.

    Unmatched templates fall back to deterministic heuristics: identity
    decomposition, pronoun-based rewrite decisions, first-anaphor
    substitution rewrites, a designated unknown answer, and last-step
    integration.
    """

    def __init__(
        self,
        rules: Sequence[StubRule] = (),
        unknown_answer: str = "unknown",
        temperature: float = 0.0,
    ):
        super().__init__(temperature=temperature)
        self.rules = list(rules)
        self.unknown_answer = unknown_answer

    @classmethod
    def from_script(cls, script: dict) -> "ScriptedGenerator":
        rules = []
        for obj in script.get("rules", []):
            if "template" not in obj or ("match" not in obj and "contains" not in obj):
                raise ContractViolation(
                    "stub rule needs 'template' and one of 'match'/'contains'"
                )
            rules.append(
                StubRule(
                    template=obj["template"],
                    match=obj.get("match"),
                    contains=obj.get("contains"),
                    reply=obj.get("reply"),
                )
            )
        return cls(
            rules=rules,
            unknown_answer=script.get("unknown_answer", "unknown"),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedGenerator":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_script(json.load(handle))

    def _lookup(self, template: str, key: str) -> StubRule | None:
        for rule in self.rules:
            if rule.template == template and rule.matches(key):
                return rule
        return None

    def _complete(self, request: GeneratorRequest) -> str:
        key = request.fields.get("question", "")
        rule = self._lookup(request.template, key)
        if rule is not None:
            reply = rule.reply
            if isinstance(reply, (list, dict)):
                return json.dumps(reply, ensure_ascii=False)
            return str(reply)
        return self._fallback(request)

    def _fallback(self, request: GeneratorRequest) -> str:
        question = request.fields.get("question", "")
        if request.template == prompts.DECOMPOSE:
            return json.dumps([question], ensure_ascii=False)
        if request.template == prompts.REWRITE_DECISION:
            has_history = request.fields.get("history_len", "0") != "0"
            return "Yes" if has_history and contains_anaphor(question) else "No"
        if request.template == prompts.REWRITE:
            return substitute_anaphor(question, request.fields.get("last_answer", ""))
        if request.template == prompts.ANSWER:
            return self.unknown_answer
        if request.template == prompts.INTEGRATE:
            last = request.fields.get("last_answer", "")
            return last if last else self.unknown_answer
        if request.template == prompts.EXTRACT_ENTITIES:
            return "[]"
        raise ContractViolation(f"unknown template {request.template!r}")


class LiveGenerator(Generator):
    """HTTP client for a chat-completions-compatible endpoint."""

    def __init__(
        self,
        endpoint_url: str,
        model: str,
        api_key: str | None = None,
        decompose_model: str = "",
        embed_endpoint_url: str = "",
        embed_model: str = "",
        temperature: float = 0.0,
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ):
        super().__init__(temperature=temperature)
        if not endpoint_url:
            raise ContractViolation("live generator needs an endpoint URL")
        if not model:
            raise ContractViolation("live generator needs a model name")
        self.endpoint_url = endpoint_url
        self.model = model
        self.decompose_model = decompose_model or model
        self.embed_endpoint_url = embed_endpoint_url
        self.embed_model = embed_model or model
        self.api_key = api_key
        self.timeout = timeout
        self.session = session or requests.Session()

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def _post(self, url: str, body: dict) -> dict:
        try:
            response = self.session.post(
                url, json=body, headers=self._headers(), timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise TransportError(f"request to {url} failed: {exc}")
        if response.status_code != 200:
            raise TransportError(
                f"{url} returned HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()
        except ValueError as exc:
            raise ProtocolError(
                f"non-JSON response body: {exc}", raw_text=response.text
            )

    def _complete(self, request: GeneratorRequest) -> str:
        model = (
            self.decompose_model
            if request.template == prompts.DECOMPOSE
            else self.model
        )
        body = {
            "model": model,
            "messages": [{"role": "user", "content": request.filled_prompt}],
            "temperature": request.temperature,
        }
        data = self._post(self.endpoint_url, body)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise ProtocolError(
                "response lacks choices[0].message.content",
                raw_text=json.dumps(data)[:500],
            )

    def embed(self, text: str) -> list[float] | None:
        if not self.embed_endpoint_url:
            return None
        body = {"model": self.embed_model, "input": text}
        data = self._post(self.embed_endpoint_url, body)
        try:
            return [float(x) for x in data["data"][0]["embedding"]]
        except (KeyError, IndexError, TypeError, ValueError):
            raise ProtocolError(
                "response lacks data[0].embedding",
                raw_text=json.dumps(data)[:500],
            )
