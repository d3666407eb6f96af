"""Transfer-matrix assembly and the device metrics: crosstalk and MDL."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateInput, MissingInput
from .modes import ModeBasis, ModeGroupMap

__all__ = [
    "PortMeasurement",
    "TransferMatrix",
    "PowerMatrix",
    "MetricsReport",
    "assemble_matrix",
    "power_condense",
    "crosstalk_db",
    "mdl_db",
    "CONDENSATION_CONVENTION",
    "XT_AGGREGATION_CONVENTION",
]

POLS = ("X", "Y")

CONDENSATION_CONVENTION = "sum over output polarizations, mean over input polarizations"
XT_AGGREGATION_CONVENTION = "mean of per-port linear ratios, then dB"


@dataclass(frozen=True)
class PortMeasurement:
    """Demultiplexed coefficients for one excitation: one vector per output pol."""

    port: int
    in_pol: str
    coeffs_x: np.ndarray
    coeffs_y: np.ndarray

    def __post_init__(self) -> None:
        if self.in_pol not in POLS:
            raise ValueError(f"in_pol must be one of {POLS}")
        cx = np.asarray(self.coeffs_x, dtype=np.complex128)
        cy = np.asarray(self.coeffs_y, dtype=np.complex128)
        if cx.shape != cy.shape or cx.ndim != 1:
            raise ValueError("coefficient vectors must be 1-D and equally sized")
        object.__setattr__(self, "coeffs_x", cx)
        object.__setattr__(self, "coeffs_y", cy)


@dataclass(frozen=True)
class TransferMatrix:
    """Complex (2M x 2P) matrix from (port, input pol) to (mode, output pol).

    Rows: modes with output-pol X first, then the same modes for Y.
    Columns: port-major, input X before Y.
    """

    entries: np.ndarray
    mode_labels: tuple[str, ...]
    port_count: int

    def __post_init__(self) -> None:
        e = np.array(self.entries, dtype=np.complex128, copy=True)
        m = len(self.mode_labels)
        if e.shape != (2 * m, 2 * self.port_count):
            raise ValueError(
                f"entries shape {e.shape} inconsistent with {m} modes, "
                f"{self.port_count} ports"
            )
        if not np.all(np.isfinite(e.view(np.float64))):
            raise ValueError("entries contain non-finite values")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n_modes(self) -> int:
        return len(self.mode_labels)

    def row_labels(self) -> list[str]:
        return [f"{m}/{p}" for p in POLS for m in self.mode_labels]

    def col_labels(self) -> list[str]:
        return [f"port{p}/{q}" for p in range(self.port_count) for q in POLS]


@dataclass(frozen=True)
class PowerMatrix:
    """Real non-negative (P x M) power transfer matrix, ports as rows."""

    entries: np.ndarray
    mode_labels: tuple[str, ...]
    convention: str = CONDENSATION_CONVENTION

    def __post_init__(self) -> None:
        e = np.array(self.entries, dtype=np.float64, copy=True)
        if e.ndim != 2 or np.any(e < 0) or not np.all(np.isfinite(e)):
            raise ValueError("power matrix must be 2-D, finite and non-negative")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)


def assemble_matrix(measurements: list[PortMeasurement], basis: ModeBasis) -> TransferMatrix:
    """Place per-excitation coefficient vectors into the transfer matrix.

    Requires exactly one measurement per (port, input pol) for ports 0..P-1;
    input order is irrelevant.
    """
    if not measurements:
        raise MissingInput("no measurements supplied")
    m = len(basis)
    ports = sorted({meas.port for meas in measurements})
    p = len(ports)
    if ports != list(range(p)):
        raise MissingInput(f"ports must cover 0..{p - 1}, got {ports}")
    entries = np.zeros((2 * m, 2 * p), dtype=np.complex128)
    seen = set()
    for meas in measurements:
        if meas.coeffs_x.shape != (m,):
            raise ValueError(
                f"coefficient vector length {meas.coeffs_x.shape[0]} != basis size {m}"
            )
        key = (meas.port, meas.in_pol)
        if key in seen:
            raise DuplicateInput(f"duplicate measurement for {key}")
        seen.add(key)
        col = 2 * meas.port + POLS.index(meas.in_pol)
        entries[:m, col] = meas.coeffs_x
        entries[m:, col] = meas.coeffs_y
    missing = [(p_, q) for p_ in range(p) for q in POLS if (p_, q) not in seen]
    if missing:
        raise MissingInput(f"missing measurements for {missing}")
    return TransferMatrix(entries, tuple(basis.labels), p)


def power_condense(t: TransferMatrix) -> PowerMatrix:
    """P[port][mode] = mean over input pols of the summed output-pol power."""
    m, p = t.n_modes, t.port_count
    power = np.abs(t.entries) ** 2
    out = np.zeros((p, m))
    for port in range(p):
        for mode in range(m):
            acc = 0.0
            for ip in range(2):
                for op in range(2):
                    acc += power[op * m + mode, 2 * port + ip]
            out[port, mode] = 0.5 * acc
    return PowerMatrix(out, t.mode_labels)


@dataclass(frozen=True)
class MetricsReport:
    """Crosstalk and MDL results plus the conventions they were computed under."""

    xt_db: float
    xt_worst_db: float
    xt_per_port_db: tuple[float, ...]
    xt_per_input_db: tuple[float, ...]
    target_groups: tuple[int, ...]
    mdl_db: float
    singular_values: tuple[float, ...]
    flags: tuple[str, ...] = ()
    conventions: dict = field(
        default_factory=lambda: {
            "condensation": CONDENSATION_CONVENTION,
            "xt_aggregation": XT_AGGREGATION_CONVENTION,
        }
    )


def _ratio_db(off: float, target: float) -> float:
    if target == 0.0:
        return math.inf
    if off == 0.0:
        return -math.inf
    return 10.0 * math.log10(off / target)


def _xt_ratios(power: np.ndarray, groups: ModeGroupMap, target_groups: list[int]) -> list[float]:
    ratios = []
    for port, g in enumerate(target_groups):
        in_power = sum(power[port, m] for m in groups.members(g))
        off_power = power[port].sum() - in_power
        ratios.append(math.inf if in_power == 0.0 else off_power / in_power)
    return ratios


def crosstalk_db(
    p: PowerMatrix,
    groups: ModeGroupMap,
    port_to_group: dict[int, int] | None = None,
) -> dict:
    """Mode-group crosstalk from a power matrix.

    Each port's target group defaults to the group receiving maximal power
    (ties to the lowest group index); pass ``port_to_group`` to fix it. The
    headline value aggregates per-port linear ratios by arithmetic mean; the
    worst case and per-port values are reported alongside.
    """
    power = p.entries
    n_ports = power.shape[0]
    if len(groups.groups) != power.shape[1]:
        raise ValueError("group map size does not match the number of modes")

    group_power = np.zeros((n_ports, groups.n_groups))
    for g in range(groups.n_groups):
        for m in groups.members(g):
            group_power[:, g] += power[:, m]
    if port_to_group is None:
        targets = [int(np.argmax(group_power[port])) for port in range(n_ports)]
    else:
        targets = [port_to_group[port] for port in range(n_ports)]

    ratios = _xt_ratios(power, groups, targets)
    flags = [f"port {i}: zero target power" for i, r in enumerate(ratios) if r == math.inf]
    finite = [r for r in ratios if r != math.inf]
    mean_ratio = math.inf if len(finite) < len(ratios) else float(np.mean(ratios))
    per_port_db = [
        math.inf if r == math.inf else (-math.inf if r == 0.0 else 10.0 * math.log10(r))
        for r in ratios
    ]
    overall = (
        math.inf
        if mean_ratio == math.inf
        else (-math.inf if mean_ratio == 0.0 else 10.0 * math.log10(mean_ratio))
    )
    worst = max(per_port_db)
    return {
        "xt_db": overall,
        "xt_worst_db": worst,
        "xt_per_port_db": tuple(per_port_db),
        "target_groups": tuple(targets),
        "flags": tuple(flags),
    }


def per_input_crosstalk_db(
    t: TransferMatrix, groups: ModeGroupMap, target_groups: tuple[int, ...]
) -> tuple[float, ...]:
    """Crosstalk of each (port, input pol) column separately, no pol averaging."""
    m = t.n_modes
    out = []
    for port in range(t.port_count):
        g = target_groups[port]
        members = set(groups.members(g))
        for ip in range(2):
            col = np.abs(t.entries[:, 2 * port + ip]) ** 2
            mode_power = col[:m] + col[m:]
            in_power = float(sum(mode_power[mm] for mm in members))
            off_power = float(mode_power.sum() - in_power)
            out.append(_ratio_db(off_power, in_power))
    return tuple(out)


def mdl_db(t: TransferMatrix | np.ndarray) -> float:
    """Mode-dependent loss 10*log10(sigma_max^2 / sigma_min^2) of the complex matrix."""
    entries = t.entries if isinstance(t, TransferMatrix) else np.asarray(t)
    if not np.any(entries):
        raise ValueError("transfer matrix is identically zero")
    s = np.linalg.svd(entries, compute_uv=False)
    if s[-1] == 0.0:
        return math.inf
    return float(10.0 * np.log10((s[0] / s[-1]) ** 2))


def metrics_report(
    t: TransferMatrix,
    groups: ModeGroupMap,
    port_to_group: dict[int, int] | None = None,
) -> MetricsReport:
    """Full report: condensed-power crosstalk, per-input crosstalk, MDL."""
    p = power_condense(t)
    xt = crosstalk_db(p, groups, port_to_group)
    s = np.linalg.svd(t.entries, compute_uv=False)
    flags = list(xt["flags"])
    if s[-1] == 0.0:
        flags.append("rank-deficient transfer matrix: MDL is +inf")
        mdl = math.inf
    else:
        mdl = float(10.0 * np.log10((s[0] / s[-1]) ** 2))
    return MetricsReport(
        xt_db=xt["xt_db"],
        xt_worst_db=xt["xt_worst_db"],
        xt_per_port_db=xt["xt_per_port_db"],
        xt_per_input_db=per_input_crosstalk_db(t, groups, xt["target_groups"]),
        target_groups=xt["target_groups"],
        mdl_db=mdl,
        singular_values=tuple(float(v) for v in s),
        flags=tuple(flags),
        conventions={
            "condensation": CONDENSATION_CONVENTION,
            "xt_aggregation": XT_AGGREGATION_CONVENTION,
            "group_map": list(groups.groups),
            "target_group_rule": "dominant group per port"
            if port_to_group is None
            else "fixed assignment",
        },
    )
