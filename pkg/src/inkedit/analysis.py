"""Structural code analysis for feedforward highlighting.

outline() parses Python sources into a nested node tree and degrades to an
indentation-block outline for code that does not parse, so it never fails.
Relatedness is token-based within the defining scope, not dataflow: this has
to run per keystroke-sized change, and the model does the semantic work.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field


@dataclass
class OutlineNode:
    kind: str  # module | class | function | block
    name: str | None
    start: int  # 1-based, inclusive
    end: int
    children: list["OutlineNode"] = field(default_factory=list)

    def contains(self, line: int) -> bool:
        return self.start <= line <= self.end


def outline(text: str) -> OutlineNode:
    lines = text.split("\n")
    root = OutlineNode("module", None, 1, max(1, len(lines)))
    try:
        tree = ast.parse(text)
    except SyntaxError:
        root.children = _indent_blocks(lines, 0, 0, len(lines))
        return root
    root.children = _ast_children(tree.body)
    return root


def _ast_children(body) -> list[OutlineNode]:
    nodes = []
    for stmt in body:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            node = OutlineNode("function", stmt.name, stmt.lineno, stmt.end_lineno)
            node.children = _ast_children(stmt.body)
            nodes.append(node)
        elif isinstance(stmt, ast.ClassDef):
            node = OutlineNode("class", stmt.name, stmt.lineno, stmt.end_lineno)
            node.children = _ast_children(stmt.body)
            nodes.append(node)
    return nodes


def _indent_width(line: str) -> int:
    return len(line) - len(line.lstrip(" \t"))


def _indent_blocks(lines: list[str], level: int, lo: int, hi: int) -> list[OutlineNode]:
    """Fallback outline: a block is a line whose following non-blank lines are
    deeper-indented, extending until indentation returns to its level."""
    nodes = []
    i = lo
    while i < hi:
        line = lines[i]
        if not line.strip():
            i += 1
            continue
        width = _indent_width(line)
        j = i + 1
        while j < hi and (not lines[j].strip() or _indent_width(lines[j]) > width):
            j += 1
        body_start = i + 1
        has_body = any(lines[k].strip() for k in range(body_start, j))
        if has_body:
            end = j
            while end > body_start and not lines[end - 1].strip():
                end -= 1
            node = OutlineNode("block", None, i + 1, end)
            node.children = _indent_blocks(lines, width + 1, body_start, end)
            nodes.append(node)
        i = j
    return nodes


def enclosing_scope(root: OutlineNode, line: int) -> OutlineNode:
    """Deepest node whose range contains the line; the module by default."""
    node = root
    while True:
        child = next((c for c in node.children if c.contains(line)), None)
        if child is None:
            return node
        node = child


_DEF_RE = re.compile(r"^\s*(?:async\s+)?def\s+([A-Za-z_]\w*)")
_CLASS_RE = re.compile(r"^\s*class\s+([A-Za-z_]\w*)")
_ASSIGN_RE = re.compile(
    r"^\s*([A-Za-z_]\w*(?:\s*,\s*[A-Za-z_]\w*)*)\s*"
    r"(?:[-+*/%&|^@]|//|\*\*|>>|<<|:[^=]*)?=(?![=<>])"
)
_FOR_RE = re.compile(r"^\s*(?:async\s+)?for\s+(.+?)\s+in\s")
_AS_RE = re.compile(r"\bas\s+([A-Za-z_]\w*)")
_NAME_RE = re.compile(r"[A-Za-z_]\w*")

_KEYWORDS = frozenset(
    "and as assert async await break class continue def del elif else except finally "
    "for from global if import in is lambda nonlocal not or pass raise return try "
    "while with yield None True False".split()
)


def _defined_names(line: str) -> set[str]:
    names: set[str] = set()
    for pattern in (_DEF_RE, _CLASS_RE):
        m = pattern.match(line)
        if m:
            names.add(m.group(1))
    m = _ASSIGN_RE.match(line)
    if m:
        names.update(_NAME_RE.findall(m.group(1)))
    m = _FOR_RE.match(line)
    if m:
        names.update(n for n in _NAME_RE.findall(m.group(1)) if n not in _KEYWORDS)
    names.update(_AS_RE.findall(line))
    return names - _KEYWORDS


def related_lines(root: OutlineNode, text: str, seed_lines) -> set[int]:
    """Seed lines, plus definition/usage lines of identifiers the seeds
    define (token match within the defining scope), plus scope headers."""
    if not seed_lines:
        raise ValueError("seed_lines must be non-empty")
    lines = text.split("\n")
    last = len(lines)
    seeds = {l for l in seed_lines if 1 <= l <= last}
    result = set(seeds)
    for seed in seeds:
        scope = enclosing_scope(root, seed)
        if scope.kind != "module":
            result.add(scope.start)
        for name in _defined_names(lines[seed - 1]):
            token = re.compile(rf"\b{re.escape(name)}\b")
            for ln in range(scope.start, min(scope.end, last) + 1):
                if token.search(lines[ln - 1]):
                    result.add(ln)
    return result
