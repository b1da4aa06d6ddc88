"""Report documents and their deterministic JSON/CSV serialization.

Machine formats print every float as ``%.12e`` and sort keys, so two runs on
the same input produce byte-identical files. Non-finite values are written as
the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .pipeline import PipelineResult
from .scenario import scenario_to_dict
from .units import TWO_PI, hz_label


def _num(x):
    return float(x)


def _axes(values):
    return {str(i + 1): _num(v) for i, v in enumerate(values)}


def summary_scalars(res: PipelineResult):
    """Flat dictionary of the headline numbers (SI, rates in rad/s)."""
    rs, th, nf, c = res.rates, res.thermal, res.noise, res.coefficients
    out = {}
    for i in range(3):
        out[f"Omega_{i + 1}"] = rs.omega[i]
    out.update(Gamma=rs.gamma, Gamma_cr=rs.gamma_cr, Gamma_over_Gamma_cr=rs.damping_margin,
               P_am=th.pressure, P_am_cr=res.critical_pressure, T_s=th.T_s, T_eff=th.T_eff,
               P_s=c.P_s, P_a=c.P_a)
    for i in range(3):
        out[f"Gamma_g_{i + 1}"] = rs.gamma_g[i]
        out[f"Gamma_r_{i + 1}"] = rs.gamma_r[i]
        out[f"m_th_{i + 1}"] = rs.n_thermal[i]
        out[f"m_{i + 1}"] = res.occupations[i]
        out[f"S_n{i + 1}"] = nf.S[i]
    fb = res.feedback
    if fb is not None:
        for i in range(3):
            out[f"fb_gain_{i + 1}"] = fb.rates.gains[i]
            out[f"fb_critical_{i + 1}"] = fb.critical[i]
            out[f"fb_m_{i + 1}"] = fb.occupations[i]
        if fb.optimum is not None:
            out["fb_optimum_gain"] = fb.optimum.gain
            out["fb_min_occupation"] = fb.optimum.min_occupation
        out["fb_operable"] = fb.ledger.operable
    return out


def build_report(res: PipelineResult, timestamp=False):
    """Nested report dictionary for one evaluated scenario."""
    c, th, rs, nf, pol = (res.coefficients, res.thermal, res.rates, res.noise,
                          res.polarizability)
    doc = {
        "tool": {"name": "levitrap", "version": __version__},
        "scenario": scenario_to_dict(res.scenario),
        "polarizability": {
            "a": pol.a, "alpha_R_low_loss": pol.alpha_R, "alpha_I_low_loss": pol.alpha_I,
            "alpha_real_exact": pol.alpha.real, "alpha_imag_exact": pol.alpha.imag,
        },
        "optics": {
            "A": _axes(c.A), "B": c.B, "B_prime": c.B_prime, "C": _axes(c.C), "k_z": c.kz,
            "P_s": c.P_s, "P_s_exact": c.P_s_exact, "P_a": c.P_a,
        },
        "thermal": {k: v for k, v in dataclasses.asdict(th).items()},
        "rates": {
            "Omega": _axes(rs.omega), "m_th": _axes(rs.n_thermal),
            "Gamma_g": _axes(rs.gamma_g), "Gamma_r": _axes(rs.gamma_r),
            "Gamma": rs.gamma, "Gamma_cr": rs.gamma_cr, "linewidth": _axes(rs.linewidth),
            "P_am_cr": res.critical_pressure, "m_no_feedback": _axes(res.occupations),
        },
        "noise_floor": {
            "S_n": _axes(nf.S), "detection_efficiency": 1.0,
            "convention": "double-sided, angular frequency, m^2 s",
        },
        "feedback": None,
        "conditions": [],
        "warnings": list(res.warnings),
        "display": {
            "Omega_1": hz_label(rs.omega[0]), "Omega_3": hz_label(rs.omega[2]),
            "Gamma_cr": hz_label(rs.gamma_cr), "Gamma": hz_label(rs.gamma),
            "P_am_cr": f"{res.critical_pressure / 100:.4g} mbar",
            "P_am": f"{th.pressure / 100:.4g} mbar",
        },
    }
    fb = res.feedback
    if fb is not None:
        doc["feedback"] = {
            "scheme": fb.scheme,
            "gains": _axes(fb.rates.gains),
            "critical_gains": _axes(fb.critical),
            "occupations": _axes(fb.occupations),
            "Gamma_g_feedback": _axes(fb.rates.gamma_g_fb),
            "Gamma_r_feedback": _axes(fb.rates.gamma_r_fb),
            "position_variance": _axes(fb.rates.variance),
            "iterations": fb.iterations,
            "residual": fb.residual,
            "intrinsic_margin": _axes(fb.intrinsic_margin),
            "gain_over_damping": _axes(fb.gain_over_damping),
            "operable": fb.ledger.operable,
        }
        if fb.optimum is not None:
            doc["feedback"]["coulomb"] = {
                "axis": fb.optimum.axis, "optimum_gain": fb.optimum.gain,
                "min_occupation": fb.optimum.min_occupation,
                "search_gain": fb.optimum.sweep_gain,
            }
            doc["display"]["optimum_gain"] = hz_label(fb.optimum.gain)
        doc["display"].update({f"critical_gain_{i + 1}": hz_label(g)
                               for i, g in enumerate(fb.critical) if math.isfinite(g)})
        doc["conditions"] = [
            {"condition": m.condition, "label": m.label, "margin": m.value,
             "threshold": m.threshold, "exempt": m.exempt, "passed": m.passed}
            for m in fb.ledger.margins
        ]
    if timestamp:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return doc


# --------------------------------------------------------------------------
# serialization

def format_float(x):
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.12e}"


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(doc, indent=2):
    return _encode(doc, indent, 0) + "\n"


def flatten(doc, prefix=""):
    """Dotted-key view of a nested document (lists indexed from 1)."""
    out = {}
    if isinstance(doc, dict):
        for k in sorted(doc, key=str):
            out.update(flatten(doc[k], f"{prefix}{k}."))
    elif isinstance(doc, (list, tuple)):
        for i, v in enumerate(doc):
            out.update(flatten(v, f"{prefix}{i + 1}."))
    else:
        out[prefix[:-1]] = doc
    return out


def csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v).strip('"')
    return str(v)


def dumps_csv(rows, header):
    """RFC-4180 CSV text with LF line endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([csv_cell(v) for v in row])
    return buf.getvalue()


def report_csv(doc):
    flat = flatten(doc)
    return dumps_csv(([k, flat[k]] for k in flat), ["key", "value"])


def hz(rate):
    """Rate in rad/s expressed as an ordinary frequency in Hz."""
    return rate / TWO_PI
