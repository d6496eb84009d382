"""Word tokenizer: golden cases, rule-level behavior, and agreement with the
independently ported reference tokenizer on query-style text."""

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

import treebank_oracle
from abcd.treebank import HOLE_TOKEN, tokenize_text


@pytest.mark.parametrize(
    "text,expected",
    [
        ("What is this person doing?", ["What", "is", "this", "person", "doing", "?"]),
        ("What's happening in the scene", ["What", "'s", "happening", "in", "the", "scene"]),
        ("don't stop", ["do", "n't", "stop"]),
        ("Isn't that the dog's bowl?", ["Is", "n't", "that", "the", "dog", "'s", "bowl", "?"]),
        ("Please describe his/her appearance in 10 words",
         ["Please", "describe", "his/her", "appearance", "in", "10", "words"]),
        ("a well-known fact.", ["a", "well-known", "fact", "."]),
        ("wait, stop; go!", ["wait", ",", "stop", ";", "go", "!"]),
    ],
)
def test_golden_tokens(text, expected):
    assert tokenize_text(text) == expected


def test_trailing_period_detaches_only_in_final_position():
    # Mid-text "e.g." keeps its period; the sentence-final one splits off.
    assert tokenize_text("e.g. not here.") == ["e.g.", "not", "here", "."]
    assert tokenize_text("just one.") == ["just", "one", "."]


def test_leading_and_trailing_quotes_detach():
    assert tokenize_text('"quoted"') == ['"', "quoted", '"']
    assert tokenize_text("'single'") == ["'", "single", "'"]


def test_brackets_detach():
    assert tokenize_text("(a b)") == ["(", "a", "b", ")"]


def test_contraction_suffixes_case_insensitive():
    assert tokenize_text("WHAT'S THIS") == ["WHAT", "'S", "THIS"]
    assert tokenize_text("DON'T") == ["DO", "N'T"]


def test_bare_apostrophe_word_not_split():
    # No suffix match: stays whole apart from quote stripping.
    assert tokenize_text("rock'n roll") == ["rock'n", "roll"]


def test_empty_and_whitespace_only():
    assert tokenize_text("") == []
    assert tokenize_text("   \t ") == []


def test_hole_token_is_not_produced_by_text():
    assert HOLE_TOKEN not in tokenize_text("plain text with no holes")


# --------------------------------------------------------------- dual route

QUERY_STYLE_SENTENCES = [
    "What is this person doing?",
    "Does the action have a negative impact?",
    "Please describe his/her appearance in 10 words",
    "Please describe his/her action in the scene",
    "Is there any negative event happening in the scene?",
    "What's happening in the scene",
    "Why does the baby start to cry in this scene?",
    "Is the man still holding a guitar in this frame?",
    "What does the man do right after he puts the guitar down?",
    "How many of the children in view are playing the game?",
    "Where does the woman put the bowl after she mixes?",
    "Is the ball still visible anywhere in this frame?",
    "How does the dog react once the ball disappears?",
    "What is this object and why might the camera single it out?",
    "Does any object recorded earlier play a key role here?",
    "Does this frame feel calm or does it feel tense?",
    "What skill is this person practicing right now?",
    "Does the practice look sharper than in earlier frames?",
    "What does the story appear to claim in this scene?",
    "Please describe this item, where it sits in the scene, and the way the camera lingers on it",
    "Isn't that the dog's bowl?",
    "We've been here; they'll come soon.",
    "don't stop",
    "It's a well-known fact.",
]


@pytest.mark.parametrize("text", QUERY_STYLE_SENTENCES, ids=lambda s: s[:32])
def test_agrees_with_reference_tokenizer(text):
    assert tokenize_text(text) == treebank_oracle.word_tokenize(text)


_WORDS = st.sampled_from(
    [
        "what", "is", "the", "person", "doing", "scene", "frame", "camera",
        "dog", "baby", "it's", "don't", "we've", "they'll", "isn't",
        "well-known", "his/her", "10", "object", "negative", "impact",
    ]
)


@settings(max_examples=150)
@given(words=st.lists(_WORDS, min_size=1, max_size=12), tail=st.sampled_from(["", "?", "!", "."]))
def test_query_style_agreement_property(words, tail):
    text = " ".join(words) + tail
    assert tokenize_text(text) == treebank_oracle.word_tokenize(text)


@settings(max_examples=150)
@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80))
def test_tokens_partition_the_non_whitespace_text(text):
    tokens = tokenize_text(text)
    assert all(tokens), "no empty tokens"
    assert "".join(tokens) == "".join(text.split())
