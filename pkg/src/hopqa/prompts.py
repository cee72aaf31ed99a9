"""Versioned prompt templates for the generation backends.

Templates are filled with ``str.format``; a filled prompt must not contain
any leftover ``{placeholder}``.
"""

from __future__ import annotations

import re

from .errors import ContractViolation

PROMPTS_VERSION = 1

DECOMPOSE = "decompose"
REWRITE_DECISION = "rewrite_decision"
REWRITE = "rewrite"
ANSWER = "answer"
INTEGRATE = "integrate"
EXTRACT_ENTITIES = "extract_entities"

TEMPLATES: dict[str, str] = {
    DECOMPOSE: """You are a question-decomposition AI assistant. Your sole mission is to split complex questions into the smallest set of essential sub-questions required for a complete answer. For each question, generate 2 distinct sub-question lists simultaneously.

Core Principles to Follow Rigorously:

1.Decompose Only When Necessary: Never split a question if it can be answered with a single piece of information. Only break it down when multiple distinct facts must be collected and connected to form the answer.
2.Zero Redundancy: Ensure no two sub-questions overlap in content or intent. Every sub-question must serve a unique purpose in answering the original query.
3.Single-Focus Sub-Questions: Each sub-question must target one and only one specific, non-negotiable piece of information. Avoid vague or multi-topic sub-questions at all costs.
4.Minimalist Sub-Question Count: Keep the number of sub-questions as small as possible, aim for 2 sub-questions at maximum for any original query.
5.Output Restriction: Your response must consist only of a valid JSON array of sub-questions. Under no circumstances include explanations, notes, or extra text.

Strict Output Format Example:
Question: "Who plays the wife of the producer of Here Comes the Boom in Grown Ups?"
Your Output:
["Who is the producer of Here Comes the Boom?", "Who plays the wife of this producer in Grown Ups?"]

Question:{question}
Break down this question into minimal necessary sub-questions:""",
    REWRITE_DECISION: """You are resolving a chain of sub-questions one at a time.

Previously answered sub-questions:
{history}

Next sub-question: {question}

Does this sub-question contain a pronoun or placeholder phrase that must be replaced with information from the previous answers before it can be searched on its own? Reply with exactly one word: Yes or No.""",
    REWRITE: """You are resolving a chain of sub-questions one at a time.

Previously answered sub-questions:
{history}

Next sub-question: {question}

Rewrite the sub-question as a fully self-contained question, replacing every pronoun or placeholder phrase with the concrete entity it refers to from the previous answers. Output only the rewritten question.""",
    ANSWER: """Answer the question using the passages below. Give only the answer, as a short phrase, with no explanation.

Passages:
{context}

Question: {question}
Answer:""",
    INTEGRATE: """A complex question was broken into sub-questions that have been answered in order:
{steps}

Original question: {question}

Combine the sub-answers into the final answer to the original question. Give only the answer, as a short phrase, with no explanation.""",
    EXTRACT_ENTITIES: """List the named entities (people, organizations, works, places, products) mentioned in the question below.

Question: {question}

Reply with only a valid JSON array of entity strings, nothing else.""",
}

_LEFTOVER_RE = re.compile(r"\{[a-z_]+\}")


def fill(template_name: str, **fields: str) -> str:
    """Substitute every placeholder of the named template."""
    try:
        template = TEMPLATES[template_name]
    except KeyError:
        raise ContractViolation(f"unknown prompt template {template_name!r}")
    try:
        prompt = template.format(**fields)
    except KeyError as exc:
        raise ContractViolation(
            f"template {template_name!r}: missing field {exc.args[0]!r}"
        )
    leftover = _LEFTOVER_RE.search(prompt)
    if leftover:
        raise ContractViolation(
            f"template {template_name!r}: unfilled placeholder {leftover.group()}"
        )
    if not prompt.strip():
        raise ContractViolation(f"template {template_name!r}: empty prompt")
    return prompt
