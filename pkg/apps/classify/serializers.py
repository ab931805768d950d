"""
Verdict text:

    verdict mode=<HOM|SIM> relation=<relation> residual=<f> tau=<f>
    transform affine m=(a,b,c,d) t=(x,y) [reflect]
    note=<text>          only for verdicts that tell the classes apart
"""

from apps.classify.models import Verdict
from apps.core.utils import fmt_float


def dump_verdict(verdict: Verdict) -> str:
    lines = [
        f"verdict mode={verdict.mode.value.upper()} relation={verdict.relation.value}"
        f" residual={fmt_float(verdict.residual)} tau={fmt_float(verdict.tau)}",
        verdict.fit.spec(),
    ]
    if verdict.note:
        lines.append(f"note={verdict.note}")
    return "\n".join(lines) + "\n"
