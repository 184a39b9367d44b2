"""Named grammars: the worked examples, the benchmark queries and the worst-case families."""

from app.logger_config import setup_logger
from engine.grammar import Grammar

logger = setup_logger()

SOCIAL = 'q -> "friendOf" | q q\n'
SAME_GENERATION = 'q -> "parentOf" q "childOf" | "parentOf" "childOf"\n'
# linear and unambiguous positive closure of "s"
Q1 = 'q1 -> a q1 | "s"\na -> "s"\n'
# ambiguous positive closure of "s"
Q2 = 'q2 -> q2 q2 | "s"\n'
# the finite language {s s s}
SSS = 'l -> a t\nt -> a a\na -> "s"\n'
# s1^k s2^k for k >= 1
MATCHED = "q -> a q_tail | a b\nq_tail -> q b\na -> \"s1\"\nb -> \"s2\"\n"

# preset name -> (grammar text, start nonterminal)
PRESETS: dict[str, tuple[str, str]] = {
    "social": (SOCIAL, "q"),
    "same-generation": (SAME_GENERATION, "q"),
    "q1": (Q1, "q1"),
    "q2": (Q2, "q2"),
    "sss": (SSS, "l"),
    "matched": (MATCHED, "q"),
}


def preset_grammar(name: str) -> tuple[Grammar, str]:
    """The normalized grammar and start nonterminal of a named preset.

    Raises:
        ValueError: If no preset has that name.
    """
    if name not in PRESETS:
        error_msg = f"Unknown grammar preset {name!r}; choose from {', '.join(PRESETS)}"
        logger.error(error_msg)
        raise ValueError(error_msg)
    text, start = PRESETS[name]
    return Grammar.from_text(text, visible=[start]), start


def _check_family_size(size: int) -> None:
    if size < 1:
        error_msg = f"A grammar family needs at least one nonterminal, got {size}"
        logger.error(error_msg)
        raise ValueError(error_msg)


def chain_text(size: int, label: str = "s") -> str:
    """`a0 -> label` and `aj -> a(j-1) a(j-1)`: a(size-1) derives only label^(2^(size-1))."""
    _check_family_size(size)
    lines = [f'a0 -> "{label}"']
    lines.extend(f"a{j} -> a{j - 1} a{j - 1}" for j in range(1, size))
    return "\n".join(lines) + "\n"


def cycle_lower_bound_text(size: int, label: str = "s") -> str:
    """Like `chain_text`, but `a0` also derives every longer run of the label.

    a(size-1) derives every run of at least 2^(size-1) labels, so on a cycle of n nodes its
    shortest closed path is the first multiple of n that reaches 2^(size-1).
    """
    _check_family_size(size)
    lines = [f'a0 -> "{label}" | a0 a0']
    lines.extend(f"a{j} -> a{j - 1} a{j - 1}" for j in range(1, size))
    return "\n".join(lines) + "\n"


def double_cycle_text(depth: int, label1: str = "s1", label2: str = "s2") -> str:
    """`a` derives label1^k label2^k; `b1 -> a a` and `bj -> b(j-1) b(j-1)` up to `depth`.

    A depth of 0 leaves the `b` nonterminals out.
    """
    if depth < 0:
        error_msg = f"Depth must not be negative, got {depth}"
        logger.error(error_msg)
        raise ValueError(error_msg)
    lines = [
        "a -> a1 a2 | a1 a_tail",
        "a_tail -> a a2",
        f'a1 -> "{label1}"',
        f'a2 -> "{label2}"',
    ]
    if depth >= 1:
        lines.append("b1 -> a a")
    lines.extend(f"b{j} -> b{j - 1} b{j - 1}" for j in range(2, depth + 1))
    return "\n".join(lines) + "\n"


def chain_grammar(size: int, label: str = "s") -> Grammar:
    return Grammar.from_text(chain_text(size, label))


def cycle_lower_bound_grammar(size: int, label: str = "s") -> Grammar:
    return Grammar.from_text(cycle_lower_bound_text(size, label))


def double_cycle_grammar(depth: int, label1: str = "s1", label2: str = "s2") -> Grammar:
    return Grammar.from_text(double_cycle_text(depth, label1, label2))
