"""Line-oriented specification of per-DMU uncertainty sets.

One record per line::

    <dmu-id> shape=<point|box|ellipsoid|rhombus|polytope|superellipsoid>
             [w=<v|v1,v2,...>] [center=<v1,v2,...>] [orders=<o1,o2>]
             [xi=<uniform|triangular>] [rows=<a1,..,az:b;...>]

Blank lines and '#' comments are ignored.  DMUs absent from the file get a
degenerate point set at their observed values.  The center defaults to the
observed values, so DMUs with masked cells must override it.
"""

from __future__ import annotations

import numpy as np

from .dataset import DataSet
from .errors import ParseError, ValidationError
from .geometry import UncertaintySet
from .sampler import XI_LAWS


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok != ""])
    except ValueError:
        raise ValueError(f"cannot parse {text!r} as numbers")


def parse_set_spec(path) -> dict[str, dict]:
    """Parse the file into {dmu_id: field dict}; geometry is built later."""
    records: dict[str, dict] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            dmu = tokens[0]
            if dmu in records:
                raise ParseError(f"duplicate record for DMU {dmu!r}", line_no)
            fields: dict = {}
            for token in tokens[1:]:
                if "=" not in token:
                    raise ParseError(f"expected key=value, got {token!r}", line_no)
                key, value = token.split("=", 1)
                try:
                    if key == "shape":
                        fields["shape"] = value
                    elif key == "w":
                        fields["w"] = _floats(value)
                    elif key == "center":
                        fields["center"] = _floats(value)
                    elif key == "orders":
                        orders = _floats(value)
                        if orders.size != 2:
                            raise ValueError("orders needs exactly two values")
                        fields["orders"] = (float(orders[0]), float(orders[1]))
                    elif key == "xi":
                        if value not in XI_LAWS:
                            raise ValueError(f"xi law must be one of {XI_LAWS}")
                        fields["xi"] = value
                    elif key == "rows":
                        rows_a, rows_b = [], []
                        for part in value.split(";"):
                            coeffs, _, bound = part.partition(":")
                            if not bound:
                                raise ValueError(f"row {part!r} needs 'coeffs:bound'")
                            rows_a.append(_floats(coeffs))
                            rows_b.append(float(bound))
                        fields["rows_a"] = np.vstack(rows_a)
                        fields["rows_b"] = np.array(rows_b)
                    else:
                        raise ValueError(f"unknown field {key!r}")
                except ValueError as exc:
                    raise ParseError(str(exc), line_no)
            if "shape" not in fields:
                raise ParseError(f"record for {dmu!r} has no shape", line_no)
            records[dmu] = fields
    return records


def build_sets(data: DataSet, records: dict[str, dict]):
    """Resolve records against a dataset -> (sets, xi_laws), one per DMU."""
    unknown = set(records) - set(data.dmu_ids)
    if unknown:
        raise ValidationError(f"set spec names unknown DMUs: {sorted(unknown)}")
    mask = data.stacked_mask()
    stacked = data.stacked()
    sets, xi_laws = [], []
    for j, dmu in enumerate(data.dmu_ids):
        fields = records.get(dmu)
        observed = stacked[:, j]
        center = fields.get("center") if fields else None
        if center is None:
            if mask[:, j].any():
                raise ValidationError(
                    f"DMU {dmu!r} has masked cells; its set spec must provide a center"
                )
            center = observed
        center = np.asarray(center, dtype=float)
        if center.size != data.z:
            raise ValidationError(
                f"center for DMU {dmu!r} has {center.size} values, expected {data.z}"
            )
        if fields is None:
            sets.append(UncertaintySet.point(center))
            xi_laws.append("uniform")
            continue
        shape = fields["shape"]
        xi_laws.append(fields.get("xi", "uniform"))
        if shape == "point":
            sets.append(UncertaintySet.point(center))
            continue
        if shape == "polytope":
            if "rows_a" not in fields:
                raise ValidationError(f"polytope for DMU {dmu!r} needs rows=")
            sets.append(
                UncertaintySet.polytope(fields["rows_a"], fields["rows_b"], center)
            )
            continue
        if "w" not in fields:
            raise ValidationError(f"shape {shape!r} for DMU {dmu!r} needs w=")
        w = fields["w"]
        if w.size == 1:
            w = np.full(data.z, float(w[0]))
        if shape == "superellipsoid":
            orders = fields.get("orders")
            if orders is None:
                raise ValidationError(f"superellipsoid for DMU {dmu!r} needs orders=")
            sets.append(UncertaintySet.superellipsoid(center, w, orders))
        else:
            sets.append(UncertaintySet(shape, center, w))
    return sets, xi_laws
