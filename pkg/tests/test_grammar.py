import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dronefetch.grammar import (
    ObjectNotFoundError,
    PromptError,
    Task,
    TaskAction,
    ObjectDescriptor,
    UnknownObjectError,
    ground_task,
    parse_prompt,
)
from dronefetch.perception import Detection, LocalizedDetection

NOUNS = {"cup", "plant", "screwdriver", "ball"}
ADJS = {"red", "green", "blue", "yellow"}


def det(noun, attrs, conf, point, oid="obj"):
    d = Detection(
        noun=noun, attributes=frozenset(attrs), bbox=(10, 10, 20, 20),
        confidence=conf, centroid_depth=1.0, object_id=oid,
    )
    return LocalizedDetection(d, np.asarray(point, dtype=float))


class TestParsePrompt:
    def test_single_command(self):
        q = parse_prompt("pick up the red cup", NOUNS, ADJS)
        assert len(q) == 1
        t = q.tasks[0]
        assert t.action == TaskAction.FETCH_AND_DELIVER
        assert t.descriptor.noun == "cup"
        assert t.descriptor.attributes == ("red",)
        assert t.priority == 0

    def test_then_sequencing(self):
        q = parse_prompt("fetch the screwdriver then bring the green plant", NOUNS, ADJS)
        assert [(t.descriptor.noun, t.descriptor.attributes, t.priority) for t in q] == [
            ("screwdriver", (), 0),
            ("plant", ("green",), 1),
        ]

    def test_unknown_object(self):
        with pytest.raises(UnknownObjectError) as exc:
            parse_prompt("pick up the unicorn", NOUNS, ADJS)
        assert exc.value.token == "unicorn"

    def test_missing_noun(self):
        with pytest.raises(PromptError):
            parse_prompt("pick up the", NOUNS, ADJS)

    def test_empty_prompt(self):
        with pytest.raises(PromptError):
            parse_prompt("   ", NOUNS, ADJS)

    def test_delivery_suffix_and_punctuation(self):
        q = parse_prompt("Please grab the blue cup, and bring it to me!", NOUNS, ADJS)
        assert q.tasks[0].descriptor == ObjectDescriptor(noun="cup", attributes=("blue",))

    def test_and_then_joiner(self):
        q = parse_prompt("get the ball and then get the cup", NOUNS, ADJS)
        assert [t.descriptor.noun for t in q] == ["ball", "cup"]

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_generated_prompts_parse_in_textual_order(self, data):
        n = data.draw(st.integers(min_value=1, max_value=4))
        clauses, nouns_order = [], []
        for _ in range(n):
            verb = data.draw(st.sampled_from(["pick up", "bring", "fetch", "grab", "get"]))
            adj = data.draw(st.sampled_from(sorted(ADJS) + [""]))
            noun = data.draw(st.sampled_from(sorted(NOUNS)))
            suffix = data.draw(st.sampled_from(["", " and bring it to me", " and give it to me"]))
            np_part = f"{adj} {noun}".strip()
            clauses.append(f"{verb} the {np_part}{suffix}")
            nouns_order.append(noun)
        joiner = data.draw(st.sampled_from([" then ", " and then "]))
        q = parse_prompt(joiner.join(clauses), NOUNS, ADJS)
        assert [t.descriptor.noun for t in q] == nouns_order
        assert [t.priority for t in q] == list(range(n))

    @settings(max_examples=100, deadline=None)
    @given(st.text(max_size=60))
    def test_total_on_arbitrary_text(self, text):
        try:
            q = parse_prompt(text, NOUNS, ADJS)
            assert len(q) >= 1
        except (PromptError, UnknownObjectError):
            pass


class TestGroundTask:
    def task(self, noun, attrs=()):
        return Task(action=TaskAction.FETCH_AND_DELIVER,
                    descriptor=ObjectDescriptor(noun=noun, attributes=tuple(attrs)), priority=0)

    def test_attribute_filter_precedes_confidence(self):
        red = det("cup", {"red"}, 0.9, [1, 0, 0], "red")
        blue = det("cup", {"blue"}, 0.95, [2, 0, 0], "blue")
        got = ground_task(self.task("cup", ["red"]), [red, blue], np.zeros(3))
        assert got.detection.object_id == "red"

    def test_confidence_tie_breaks_on_distance(self):
        near = det("cup", {"red"}, 0.9, [1, 0, 0], "near")
        far = det("cup", {"red"}, 0.9, [2, 0, 0], "far")
        got = ground_task(self.task("cup", ["red"]), [far, near], np.zeros(3))
        assert got.detection.object_id == "near"

    def test_no_match_raises(self):
        plant = det("plant", set(), 0.9, [1, 0, 0])
        with pytest.raises(ObjectNotFoundError):
            ground_task(self.task("cup", ["red"]), [plant], np.zeros(3))

    def test_bare_noun_matches_attributed_detection(self):
        red = det("cup", {"red"}, 0.9, [1, 0, 0], "red")
        got = ground_task(self.task("cup"), [red], np.zeros(3))
        assert got.detection.object_id == "red"

    def test_deterministic(self):
        dets = [det("cup", {"red"}, 0.8, [1, 1, 0], f"c{i}") for i in range(3)]
        a = ground_task(self.task("cup"), dets, np.zeros(3))
        b = ground_task(self.task("cup"), dets, np.zeros(3))
        assert a is b or a == b
