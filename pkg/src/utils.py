import json
from collections import Counter
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .dualitylab import FAIL, PASS, SKIP, VerificationReport


def validate_precision_parameters(window: int, order: int, length: int, samples: int,
                                  ring_size: Optional[int] = None) -> List[str]:
    """
    Validate precision parameters and return list of warnings/errors.
    Entries starting with ❌ make the run invalid.
    """
    warnings = []

    if window < 1:
        warnings.append("❌ The Witt window needs at least 1 target coordinate")
    elif ring_size is not None and ring_size ** (window + 1) > 4096:
        warnings.append(f"⚠️ Window W{window + 1} over {ring_size} elements "
                        f"enumerates {ring_size ** (window + 1)} vectors")

    if order < 1:
        warnings.append("❌ Series order must be at least 1")
    elif order > 12:
        warnings.append("⚠️ Series orders above 12 make symbolic checks slow")

    if length < 1:
        warnings.append("❌ Symbolic vectors need at least 1 coordinate")
    elif length > 5:
        warnings.append("⚠️ Symbolic vectors longer than 5 exceed the cached structure depth")

    if samples < 1:
        warnings.append("❌ At least 1 random sample is required")
    elif samples > 1000:
        warnings.append("⚠️ Many samples will slow down the sampled checks")

    return warnings


def has_errors(warnings: Sequence[str]) -> bool:
    return any(w.startswith("❌") for w in warnings)


def summarize(reports: Sequence[VerificationReport]) -> Dict[str, int]:
    counts = Counter(r.outcome for r in reports)
    return {"total": len(reports), PASS: counts[PASS], FAIL: counts[FAIL], SKIP: counts[SKIP]}


def export_report(reports: Sequence[VerificationReport], instance: str, suites: Sequence[str],
                  seed: int, timings: bool = False) -> Dict[str, Any]:
    """
    Report data for the JSON file.  Timings are zeroed unless requested,
    so repeated runs with one seed produce identical files.
    """
    checks = []
    for r in reports:
        entry = r.to_dict()
        if not timings:
            entry["millis"] = 0
        checks.append(entry)
    return {
        "metadata": {
            "instance": instance,
            "suites": list(suites),
            "seed": seed,
            "version": f"wittlab {__version__}",
        },
        "checks": checks,
        "summary": summarize(reports),
    }


def dumps_report(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def format_summary(reports: Sequence[VerificationReport]) -> str:
    """
    Format check outcomes for the terminal.
    """
    marks = {PASS: "✅ PASS", FAIL: "❌ FAIL", SKIP: "⏭️  SKIP"}
    lines = [f"{marks[r.outcome]}  {r.check:<28} [{r.anchor}]" for r in reports]
    totals = summarize(reports)
    lines.append("")
    lines.append(f"{totals[PASS]} passed, {totals[FAIL]} failed, {totals[SKIP]} skipped "
                 f"of {totals['total']} checks")
    return "\n".join(lines)
