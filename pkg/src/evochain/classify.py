"""Source diffing and change categorization for consecutive versions.

Changes between versions are categorized as vulnerability fixes, feature
modifications, gas optimizations or other, from three independent signals:
vulnerability findings that disappeared, function-signature churn, and
deployment gas deltas.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .ingest import VulnFinding

DEFAULT_GAS_THRESHOLD = 0.05

VULNERABILITY_FIX = "VulnerabilityFix"
FEATURE_MODIFICATION = "FeatureModification"
GAS_OPTIMIZATION = "GasOptimization"
OTHER = "Other"

CATEGORY_ORDER = (VULNERABILITY_FIX, FEATURE_MODIFICATION, GAS_OPTIMIZATION, OTHER)

_FUNCTION_RE = re.compile(r"\bfunction\s+([A-Za-z_]\w*)\s*\(([^)]*)\)")


@dataclass(frozen=True)
class SourceDiff:
    added_functions: frozenset[str]
    removed_functions: frozenset[str]
    modified_functions: frozenset[str]
    lines_added: int
    lines_removed: int

    @property
    def empty(self) -> bool:
        return not (self.added_functions or self.removed_functions
                    or self.modified_functions or self.lines_added
                    or self.lines_removed)


@dataclass(frozen=True)
class ChangeReport:
    from_version: int
    to_version: int
    categories: tuple[str, ...]
    evidence: tuple[str, ...]


def _strip_comments_and_strings(text: str) -> str:
    """Blank out //, /* */ comments and quoted literals, keeping line structure."""
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
        elif ch == "/" and i + 1 < n and text[i + 1] == "*":
            end = text.find("*/", i + 2)
            end = n if end < 0 else end + 2
            out.extend(c if c == "\n" else " " for c in text[i:end])
            i = end
        elif ch in "\"'":
            quote = ch
            out.append(" ")
            i += 1
            while i < n and text[i] != quote:
                if text[i] == "\\":
                    i += 1
                i += 1
            i += 1
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _normalize_params(params: str) -> str:
    types = []
    for param in params.split(","):
        tokens = param.split()
        if tokens:
            types.append(tokens[0])
    return ",".join(types)


def _extract_functions(text: str) -> dict[str, str]:
    """Map signature -> body text, via a tolerant lexical scan."""
    stripped = _strip_comments_and_strings(text)
    functions: dict[str, str] = {}
    for match in _FUNCTION_RE.finditer(stripped):
        signature = f"{match.group(1)}({_normalize_params(match.group(2))})"
        functions[signature] = _function_body(stripped, match.end())
    return functions


def _function_body(text: str, start: int) -> str:
    brace = text.find("{", start)
    # Declarations without a body (interfaces) or with a '{' beyond the next
    # declaration contribute an empty body.
    next_fn = text.find("function", start)
    if brace < 0 or (0 <= next_fn < brace):
        return ""
    depth = 0
    for i in range(brace, len(text)):
        if text[i] == "{":
            depth += 1
        elif text[i] == "}":
            depth -= 1
            if depth == 0:
                return " ".join(text[brace:i + 1].split())
    return " ".join(text[brace:].split())


def diff_sources(old_source: str, new_source: str) -> SourceDiff:
    """Function-signature and line-level diff of two source texts."""
    old_fns = _extract_functions(old_source)
    new_fns = _extract_functions(new_source)
    added = frozenset(new_fns) - frozenset(old_fns)
    removed = frozenset(old_fns) - frozenset(new_fns)
    modified = frozenset(
        sig for sig in (frozenset(old_fns) & frozenset(new_fns))
        if old_fns[sig] != new_fns[sig])

    lines_added = lines_removed = 0
    if old_source != new_source:
        matcher = difflib.SequenceMatcher(
            a=old_source.splitlines(), b=new_source.splitlines(), autojunk=False)
        for tag, i1, i2, j1, j2 in matcher.get_opcodes():
            if tag in ("replace", "delete"):
                lines_removed += i2 - i1
            if tag in ("replace", "insert"):
                lines_added += j2 - j1
    return SourceDiff(
        added_functions=frozenset(added),
        removed_functions=frozenset(removed),
        modified_functions=modified,
        lines_added=lines_added,
        lines_removed=lines_removed,
    )


def classify_change(diff: SourceDiff,
                    old_findings: Iterable[VulnFinding] = (),
                    new_findings: Iterable[VulnFinding] = (),
                    old_gas: Optional[int] = None,
                    new_gas: Optional[int] = None,
                    from_version: int = 1,
                    to_version: Optional[int] = None,
                    gas_threshold: float = DEFAULT_GAS_THRESHOLD) -> ChangeReport:
    """Assign change categories by independent rules.

    Vulnerability fixes are detected by finding categories present before
    and absent after; features by signature churn; gas optimizations by a
    deployment-gas drop of at least ``gas_threshold`` when signatures did
    not change. Anything else is Other.
    """
    if to_version is None:
        to_version = from_version + 1
    categories: list[str] = []
    evidence: list[str] = []

    old_categories = {f.category for f in old_findings}
    new_categories = {f.category for f in new_findings}
    fixed = sorted(old_categories - new_categories)
    if fixed:
        categories.append(VULNERABILITY_FIX)
        evidence.extend(f"fixed:{c}" for c in fixed)

    churn = sorted(diff.added_functions | diff.removed_functions)
    if churn:
        categories.append(FEATURE_MODIFICATION)
        evidence.extend(f"sig+:{s}" for s in sorted(diff.added_functions))
        evidence.extend(f"sig-:{s}" for s in sorted(diff.removed_functions))

    if (not churn and old_gas is not None and new_gas is not None
            and old_gas > 0 and new_gas <= old_gas * (1 - gas_threshold)):
        categories.append(GAS_OPTIMIZATION)
        evidence.append(f"gas:{(new_gas - old_gas) / old_gas * 100:+.1f}%")

    if not categories:
        categories.append(OTHER)
    return ChangeReport(
        from_version=from_version,
        to_version=to_version,
        categories=tuple(categories),
        evidence=tuple(evidence),
    )
