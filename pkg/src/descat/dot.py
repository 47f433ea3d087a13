"""Graphviz DOT rendering of automata and observers."""

from __future__ import annotations

from .automata import EPSILON, Automaton


def _underlying(obj) -> Automaton:
    if isinstance(obj, Automaton):
        return obj
    for attr in ("observer", "automaton"):
        inner = getattr(obj, attr, None)
        if isinstance(inner, Automaton):
            return inner
    raise TypeError(f"cannot render {type(obj).__name__} as DOT")


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(obj, name: str = "G") -> str:
    """Render an automaton (or anything wrapping one) as a DOT digraph.

    Marked states are doubly circled, silent edges dashed, and all output
    is sorted so identical inputs produce identical bytes.  Parallel edges
    between the same states are merged into one comma-labelled edge.
    """
    a = _underlying(obj)
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", '  __init [shape=point, label=""];']
    for state in sorted(a.states):
        shape = "doublecircle" if state in a.marked else "circle"
        lines.append(f"  {_quote(state)} [shape={shape}];")
    lines.append(f"  __init -> {_quote(a.initial)};")
    grouped: dict[tuple[str, str, bool], list[str]] = {}
    for src, label, dst in a.transitions:
        silent = label == EPSILON
        grouped.setdefault((src, dst, silent), []).append(label)
    for (src, dst, silent), labels in sorted(grouped.items()):
        text = ",".join(sorted(set(labels)))
        style = ", style=dashed" if silent else ""
        lines.append(f"  {_quote(src)} -> {_quote(dst)} [label={_quote(text)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
