"""Ready-made demo instrument: a 63-question survey covering interval
reproduction, marble estimation under partial information, and
subjectively ambiguous items, plus the matching ground truth, factor
codings, and item covariates.

Only the cat, royal python, and large dog reference intervals are fixed
chart values; the other animal rows, the exact marble colorings, and the
wording of the subjective items are illustrative defaults that desk-scale
replications are expected to override.
"""

from __future__ import annotations

from .intervals import Interval, ScaleSpec
from .survey import GroundTruth, MarbleStimulus, Question, SurveyDefinition

ANIMAL_SCALE = ScaleSpec(0.0, 40.0, "0 years", "40 years", tick_values=tuple(range(0, 41, 5)))
MARBLE_SCALE = ScaleSpec(0.0, 7.0, "0", "7", tick_values=tuple(range(8)))
PERCENT_SCALE = ScaleSpec(0.0, 100.0, "0%", "100%")
AGREE_SCALE = ScaleSpec(0.0, 100.0, "Not at all", "Very well")
TEMPERATURE_SCALE = ScaleSpec(-10.0, 40.0, "-10 C", "40 C")
COUNT8_SCALE = ScaleSpec(0.0, 8.0, "0", "8", tick_values=tuple(range(9)))
ORDINAL5_SCALE = ScaleSpec(1.0, 5.0, "Strongly Disagree", "Strongly Agree", tick_values=(1, 2, 3, 4, 5))

# Fixed reference lifespans from the published chart (years).
STATED_ANIMAL_TRUTH = {
    "animal_cat": Interval(15.0, 20.0),
    "animal_royal_python": Interval(20.0, 30.0),
    "animal_large_dog": Interval(8.0, 12.0),
}

# Illustrative defaults for the remaining chart rows; override these with
# real chart data when replicating with a different stimulus.
DEMO_ANIMAL_EXTRAS = {
    "animal_hamster": Interval(2.0, 3.0),
    "animal_guinea_pig": Interval(4.0, 7.0),
    "animal_rabbit": Interval(6.0, 10.0),
    "animal_goldfish": Interval(10.0, 25.0),
    "animal_parrot": Interval(20.0, 35.0),
}

ANIMAL_TRUTH = {**STATED_ANIMAL_TRUTH, **DEMO_ANIMAL_EXTRAS}

# Six marble sets of five rows (seven marbles per row), each shown three
# times: with six, three, then zero marbles hidden per row. Rows are
# (visible blue, visible total, hidden); reveals are mutually consistent
# with one fixed underlying coloring per set.
_SET_STAGES: dict[int, dict[int, tuple[int, ...]]] = {
    1: {6: (1, 0, 1, 0, 0), 3: (2, 1, 2, 1, 1), 0: (2, 2, 2, 2, 2)},
    2: {6: (1, 1, 1, 1, 1), 3: (3, 4, 3, 4, 3), 0: (6, 6, 6, 6, 6)},
    3: {6: (0, 1, 0, 1, 1), 3: (0, 4, 1, 3, 2), 0: (0, 7, 1, 6, 3)},
    4: {6: (0, 1, 0, 1, 0), 3: (1, 2, 1, 2, 1), 0: (1, 4, 2, 3, 1)},
    5: {6: (1, 0, 1, 0, 1), 3: (3, 1, 4, 2, 3), 0: (5, 2, 6, 3, 5)},
    6: {6: (1, 1, 0, 1, 1), 3: (2, 3, 0, 2, 2), 0: (4, 4, 0, 4, 4)},
}

MARBLE_STIMULI: dict[str, MarbleStimulus] = {
    f"marbles_s{set_no}_h{hidden}": MarbleStimulus(
        rows=tuple((blue, 7 - hidden, hidden) for blue in blues)
    )
    for set_no, stages in _SET_STAGES.items()
    for hidden, blues in stages.items()
}

_PERSONALITY_WORDS = {
    "talkative": ("talkative", "garrulous", "brendacious"),
    "aggressive": ("aggressive", "bellicose", "apoccular"),
    "lazy": ("lazy", "indolent", "lombardistic"),
    "quiet": ("quiet", "taciturn", "revenotile"),
}
_WORD_FREQUENCIES = ("high", "low", "pseudo")

_BARREL_TOPICS = {
    "books_tv": ("reading books and watching television", "reading books", "watching television"),
    "sports": ("watching and playing sports", "watching sports", "playing sports"),
    "tea_coffee": ("drinking tea and coffee", "drinking tea", "drinking coffee"),
    "cooking_eating": ("cooking and eating", "cooking", "eating"),
}
_BARREL_SUBJECTS = ("both", "first", "second")


def demo_survey(include_feedback: bool = False) -> SurveyDefinition:
    """Build the 63-question demo instrument (67 with feedback items)."""
    questions: list[Question] = []

    for qid in ANIMAL_TRUTH:
        animal = qid.removeprefix("animal_").replace("_", " ")
        questions.append(
            Question(
                id=qid,
                text=f"From the chart, what is the natural life expectancy of a {animal}?",
                scale=ANIMAL_SCALE,
                section="reproduce",
                stimulus_ref="stimuli/animal_lifespans.png",
            )
        )

    for qid in MARBLE_STIMULI:
        set_no = qid.split("_")[1][1:]
        questions.append(
            Question(
                id=qid,
                text=f"How many marbles in each row of set {set_no} are blue?",
                scale=MARBLE_SCALE,
                section="marbles",
                stimulus_ref=f"stimuli/{qid}.png",
            )
        )

    for qid, text in (
        ("temp_unqualified_before", "What is the temperature in England?"),
        ("temp_december", "What is the temperature in England in December?"),
        ("temp_july", "What is the temperature in England in July?"),
        ("temp_unqualified_after", "What is the temperature in England?"),
    ):
        questions.append(Question(id=qid, text=text, scale=TEMPERATURE_SCALE, section="subjective"))

    questions.append(
        Question(
            id="recycle_increase_half",
            text="A town recycles 10% of its waste. Its recycling rate is increased by 50%. What is the new rate?",
            scale=PERCENT_SCALE,
            section="subjective",
        )
    )
    questions.append(
        Question(
            id="recycle_double",
            text="A town recycles 10% of its waste. Its recycling rate is doubled. What is the new rate?",
            scale=PERCENT_SCALE,
            section="subjective",
        )
    )

    for words in _PERSONALITY_WORDS.values():
        for word in words:
            questions.append(
                Question(
                    id=f"pers_{word}",
                    text=f"How well does the word '{word}' describe you?",
                    scale=AGREE_SCALE,
                    section="subjective",
                )
            )

    for topic, phrasings in _BARREL_TOPICS.items():
        for subject, phrase in zip(_BARREL_SUBJECTS, phrasings):
            questions.append(
                Question(
                    id=f"barrel_{topic}_{subject}",
                    text=f"How well does this statement describe you? I like {phrase}.",
                    scale=AGREE_SCALE,
                    section="subjective",
                )
            )

    for image in ("a", "b"):
        for category in ("cars", "vehicles"):
            questions.append(
                Question(
                    id=f"veh_{image}_{category}",
                    text=f"How many {category} are in image {image.upper()}?",
                    scale=COUNT8_SCALE,
                    section="subjective",
                    stimulus_ref=f"stimuli/vehicles_{image}.png",
                )
            )

    for qid, text in (
        ("amb_solid", "How many marbles in each row are blue? (solid colors)"),
        ("amb_gradient", "How many marbles in each row are blue? (color gradient)"),
        ("amb_patterned", "How many marbles in each row are blue? (patterned marbles)"),
    ):
        questions.append(
            Question(
                id=qid,
                text=text,
                scale=COUNT8_SCALE,
                section="subjective",
                stimulus_ref=f"stimuli/{qid}.png",
            )
        )

    if include_feedback:
        for qid, text in (
            ("fb_easy_to_use", "The response format was easy to use."),
            ("fb_unnecessarily_complex", "The response format was unnecessarily complex."),
            ("fb_communicate", "The format let me effectively communicate my desired response."),
            ("fb_overall_liking", "Overall, I liked the response format."),
        ):
            questions.append(Question(id=qid, text=text, scale=ORDINAL5_SCALE, section="feedback"))

    return SurveyDefinition(
        survey_id="ivdemo-01",
        title="Interval-valued response demo instrument",
        questions=tuple(questions),
    )


def demo_ground_truth() -> GroundTruth:
    """Reference intervals for the reproduction and marble sections."""
    intervals = dict(ANIMAL_TRUTH)
    from .survey import marble_benchmark

    for qid, stim in MARBLE_STIMULI.items():
        intervals[qid] = marble_benchmark(stim)
    return GroundTruth(intervals)


def marble_design() -> dict[str, dict[str, str]]:
    """Factor coding of the marble questions: set number x hidden count."""
    return {
        qid: {"set": qid.split("_")[1][1:], "hidden": qid.split("_")[2][1:]}
        for qid in MARBLE_STIMULI
    }


def marble_item_covariates() -> dict[str, dict[str, str]]:
    """Mixed-model covariates per marble question, as a design table."""
    table = {}
    for qid, stim in MARBLE_STIMULI.items():
        xb, xh, xd = stim.covariates()
        table[qid] = {"xB": repr(xb), "xH": repr(xh), "xD": repr(xd)}
    return table


def personality_design() -> dict[str, dict[str, str]]:
    return {
        f"pers_{word}": {"characteristic": characteristic, "word_frequency": freq}
        for characteristic, words in _PERSONALITY_WORDS.items()
        for freq, word in zip(_WORD_FREQUENCIES, words)
    }


def barrelled_design() -> dict[str, dict[str, str]]:
    return {
        f"barrel_{topic}_{subject}": {"topic": topic, "subject": subject}
        for topic in _BARREL_TOPICS
        for subject in _BARREL_SUBJECTS
    }


def vehicle_design() -> dict[str, dict[str, str]]:
    return {
        f"veh_{image}_{category}": {"image": image, "category": category}
        for image in ("a", "b")
        for category in ("cars", "vehicles")
    }


def temperature_design() -> dict[str, dict[str, str]]:
    return {
        "temp_unqualified_before": {"time_spec": "unqualified_before"},
        "temp_december": {"time_spec": "december"},
        "temp_july": {"time_spec": "july"},
        "temp_unqualified_after": {"time_spec": "unqualified_after"},
    }


def ambiguous_marble_design() -> dict[str, dict[str, str]]:
    return {
        "amb_solid": {"stimulus": "solid"},
        "amb_gradient": {"stimulus": "gradient"},
        "amb_patterned": {"stimulus": "patterned"},
    }
