"""Prompt grammar: parse a text command into a prioritized task queue,
and ground tasks against localized detections.

Grammar (EBNF, case-insensitive, punctuation-tolerant):

    prompt    = clause { ("then" | "and then") clause } ;
    clause    = { filler } [ verb ] { filler } { adjective } noun [ delivery ] ;
    verb      = "pick" [ "up" ] | "bring" | "fetch" | "grab" | "get" ;
    delivery  = "and" ("bring" | "give") "it" "to" "me" ;
    filler    = "the" | "a" | "an" | "please" | "up" | "me" ;

Adjectives and nouns come from the scene vocabulary; an unknown word in
the noun slot is a typed error, never a crash.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .perception import LocalizedDetection


class PromptError(ValueError):
    """Prompt text does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at character {position})")
        self.position = position


class UnknownObjectError(ValueError):
    """Noun slot holds a word outside the scene vocabulary."""

    def __init__(self, token: str, position: int):
        super().__init__(f"unknown object {token!r} (at character {position})")
        self.token = token
        self.position = position


class ObjectNotFoundError(ValueError):
    """No detection matches the task descriptor."""


class TaskAction(Enum):
    FETCH_AND_DELIVER = "fetch_and_deliver"


@dataclass(frozen=True)
class ObjectDescriptor:
    noun: str
    attributes: tuple[str, ...]

    def __post_init__(self):
        if not self.noun:
            raise ValueError("descriptor noun must be non-empty")


@dataclass(frozen=True)
class Task:
    action: TaskAction
    descriptor: ObjectDescriptor
    priority: int


@dataclass(frozen=True)
class TaskQueue:
    tasks: tuple[Task, ...]

    def __post_init__(self):
        if list(t.priority for t in self.tasks) != list(range(len(self.tasks))):
            raise ValueError("task priorities must be contiguous from 0")

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self):
        return len(self.tasks)


_VERBS = {"pick", "bring", "fetch", "grab", "get"}
_FILLERS = {"the", "a", "an", "please", "up", "me", "it", "to"}
_DELIVERY = {"and", "bring", "give", "it", "to", "me", "please"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    """Lowercased word tokens with character offsets; punctuation dropped."""
    tokens = []
    for m in re.finditer(r"[A-Za-z']+", text):
        tokens.append((m.group(0).lower().strip("'"), m.start()))
    return [(w, p) for w, p in tokens if w]


def _split_clauses(tokens):
    """Split on "then" ("and then" collapses into the same joiner)."""
    clauses = [[]]
    for k, (word, pos) in enumerate(tokens):
        if word == "then":
            if clauses[-1] and clauses[-1][-1][0] == "and":
                clauses[-1].pop()
            clauses.append([])
        else:
            clauses[-1].append((word, pos))
    return clauses


def parse_prompt(text: str, nouns: set[str], adjectives: set[str]) -> TaskQueue:
    """Parse `text` into a TaskQueue; priorities follow textual order.

    Raises PromptError for text outside the grammar and
    UnknownObjectError when the noun slot holds an out-of-vocabulary word.
    """
    if not text or not text.strip():
        raise PromptError("empty prompt", 0)
    tokens = _tokenize(text)
    if not tokens:
        raise PromptError("no words in prompt", 0)
    tasks = []
    for clause in _split_clauses(tokens):
        if not clause:
            raise PromptError("empty command clause", len(text))
        idx = 0
        while idx < len(clause) and clause[idx][0] in _FILLERS:
            idx += 1
        if idx < len(clause) and clause[idx][0] in _VERBS:
            idx += 1
        attributes: list[str] = []
        noun = None
        while idx < len(clause):
            word, pos = clause[idx]
            if word in _FILLERS:
                idx += 1
                continue
            if word in adjectives:
                attributes.append(word)
                idx += 1
                continue
            if word in nouns:
                noun = word
                idx += 1
                break
            raise UnknownObjectError(word, pos)
        if noun is None:
            raise PromptError("expected an object noun", clause[-1][1] + len(clause[-1][0]))
        # optional delivery tail; anything else is a grammar violation
        while idx < len(clause):
            word, pos = clause[idx]
            if word in _DELIVERY:
                idx += 1
                continue
            raise PromptError(f"unexpected word {word!r} after object", pos)
        tasks.append(
            Task(
                action=TaskAction.FETCH_AND_DELIVER,
                descriptor=ObjectDescriptor(noun=noun, attributes=tuple(attributes)),
                priority=len(tasks),
            )
        )
    return TaskQueue(tasks=tuple(tasks))


def ground_task(
    task: Task,
    detections: list[LocalizedDetection],
    drone_position: np.ndarray,
) -> LocalizedDetection:
    """Pick the detection matching the task descriptor.

    Noun must match exactly and the descriptor attributes must be a
    subset of the detection's; highest confidence wins, confidence ties
    break on distance to the drone. Deterministic for fixed inputs.
    """
    want = set(task.descriptor.attributes)
    matches = [
        ld
        for ld in detections
        if ld.detection.noun == task.descriptor.noun and want <= set(ld.detection.attributes)
    ]
    if not matches:
        raise ObjectNotFoundError(f"no detection matches {task.descriptor.noun!r} with attributes {sorted(want)}")
    drone_position = np.asarray(drone_position, dtype=float)
    return min(
        matches,
        key=lambda ld: (-ld.detection.confidence, float(np.linalg.norm(ld.world_point - drone_position))),
    )
