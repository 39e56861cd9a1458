"""Two-mode linear optics for a single photon.

Every element is a 2x2 unitary acting on the amplitudes of the two modes
(paths Q0/Q1 or polarizations H/V). States stay at the density-matrix level;
there is no Fock-space treatment.

Circuit JSON uses one object per element, e.g. ``{"kind": "rotation_bs",
"theta": 0.161}``. Recognised kinds and their parameters are listed in
``ELEMENT_PARAMS``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DimMismatch, EqualizationUnreachable, NotUnitary
from .search import detector_basis
from .states import (
    DensityOperator,
    MeasurementBasis,
    OutcomeDistribution,
    make_density,
    outcome_probabilities,
)

ELEMENT_UNITARY_TOL = 1e-12
CIRCUIT_UNITARY_TOL = 1e-10
EQUAL_TOL = 1e-9

ELEMENT_PARAMS: dict[str, tuple[str, ...]] = {
    "generic_bs": ("theta", "phi"),
    "rotation_bs": ("theta",),
    "balanced_bs": (),
    "phase_shifter": ("phi",),
    "half_wave_plate": ("alpha",),
    "hwp2_fixed_swap": (),
    # Jones matrix of a real half-wave plate; opt-in only
    "physical_hwp": ("alpha",),
}


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _matrix(kind: str, theta: float, phi: float, alpha: float) -> np.ndarray:
    if kind == "generic_bs":
        c, s = math.cos(theta), math.sin(theta)
        e = complex(math.cos(phi), math.sin(phi))
        return np.array([[c, -e * s], [e.conjugate() * s, c]], dtype=complex)
    if kind == "rotation_bs":
        return rotation(theta)
    if kind == "balanced_bs":
        return np.array([[1, -1], [1, 1]], dtype=complex) / math.sqrt(2)
    if kind == "phase_shifter":
        return np.diag([1.0, complex(math.cos(phi), math.sin(phi))])
    if kind == "half_wave_plate":
        # rotation by 2 alpha about the y axis of the Poincare sphere
        return rotation(alpha)
    if kind == "hwp2_fixed_swap":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "physical_hwp":
        c, s = math.cos(2 * alpha), math.sin(2 * alpha)
        return np.array([[c, s], [s, -c]], dtype=complex)
    raise ValueError(f"unknown optical element kind {kind!r}")


@dataclass(frozen=True)
class OpticalElement:
    kind: str
    theta: float = 0.0
    phi: float = 0.0
    alpha: float = 0.0
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ELEMENT_PARAMS:
            raise ValueError(f"unknown optical element kind {self.kind!r}")
        m = _matrix(self.kind, self.theta, self.phi, self.alpha)
        err = float(np.abs(m @ m.conj().T - np.eye(2)).max())
        if err > ELEMENT_UNITARY_TOL:
            raise NotUnitary(f"{self.kind} matrix off unitarity by {err:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        for name in ELEMENT_PARAMS[self.kind]:
            out[name] = getattr(self, name)
        return out

    @classmethod
    def from_json(cls, obj: dict, allow_physical_hwp: bool = False) -> "OpticalElement":
        kind = obj.get("kind")
        if kind not in ELEMENT_PARAMS:
            raise ValueError(f"unknown optical element kind {kind!r}")
        if kind == "physical_hwp" and not allow_physical_hwp:
            raise ValueError("physical_hwp is disabled; pass allow_physical_hwp=True")
        extra = set(obj) - {"kind", *ELEMENT_PARAMS[kind]}
        if extra:
            raise ValueError(f"unexpected fields for {kind}: {sorted(extra)}")
        missing = [p for p in ELEMENT_PARAMS[kind] if p not in obj]
        if missing:
            raise ValueError(f"missing fields for {kind}: {missing}")
        return cls(kind, **{p: float(obj[p]) for p in ELEMENT_PARAMS[kind]})


def GenericBS(theta: float, phi: float) -> OpticalElement:
    return OpticalElement("generic_bs", theta=theta, phi=phi)


def RotationBS(theta: float) -> OpticalElement:
    return OpticalElement("rotation_bs", theta=theta)


def Balanced50_50() -> OpticalElement:
    return OpticalElement("balanced_bs")


def PhaseShifter(phi: float) -> OpticalElement:
    return OpticalElement("phase_shifter", phi=phi)


def HalfWavePlate(alpha: float) -> OpticalElement:
    return OpticalElement("half_wave_plate", alpha=alpha)


def HWP2FixedSwap() -> OpticalElement:
    return OpticalElement("hwp2_fixed_swap")


def PhysicalHWP(alpha: float) -> OpticalElement:
    return OpticalElement("physical_hwp", alpha=alpha)


def element_matrix(e: OpticalElement) -> np.ndarray:
    return e.matrix


def mode_operator(e: OpticalElement) -> np.ndarray:
    """Action of an element on the two-mode amplitudes.

    ``hwp2_fixed_swap`` turns V into H inside the reflected arm only: the
    photon's which-arm amplitudes are untouched, so its two-mode action is
    the identity even though its Jones matrix is the swap.
    """
    if e.kind == "hwp2_fixed_swap":
        return np.eye(2, dtype=complex)
    return e.matrix


def beam_splitter_coefficients(e: OpticalElement) -> tuple[float, float]:
    """(R, T) = (sin^2 theta, cos^2 theta) for beam splitters."""
    m = e.matrix
    return float(abs(m[0, 1]) ** 2), float(abs(m[0, 0]) ** 2)


@dataclass(frozen=True)
class OpticalCircuit:
    """Ordered elements plus the phase of the final {D0, D1} analysis.

    A circuit ending in ``balanced_bs`` is read out by the detectors behind
    that beam splitter, which projects the state reaching it onto
    {|D0(detection_phase)>, |D1(detection_phase)>}. Any other circuit is
    read out by bare detectors in the mode basis.
    """

    elements: tuple[OpticalElement, ...]
    detection_phase: float = 0.0
    mode_labels: tuple[str, str] = ("Q0", "Q1")

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        u = self.composite()
        err = float(np.abs(u @ u.conj().T - np.eye(2)).max())
        if err > CIRCUIT_UNITARY_TOL:
            raise NotUnitary(f"circuit composite off unitarity by {err:.3e}")

    @property
    def interferometric(self) -> bool:
        return bool(self.elements) and self.elements[-1].kind == "balanced_bs"

    def composite(self, elements: Sequence[OpticalElement] | None = None) -> np.ndarray:
        u = np.eye(2, dtype=complex)
        for e in self.elements if elements is None else elements:
            u = mode_operator(e) @ u
        return u

    def pre_detection(self) -> np.ndarray:
        """Composite of everything before the terminal beam splitter."""
        return self.composite(self.elements[:-1] if self.interferometric else self.elements)

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.elements]

    @classmethod
    def from_json(
        cls,
        items: list[dict],
        detection_phase: float = 0.0,
        mode_labels: tuple[str, str] = ("Q0", "Q1"),
        allow_physical_hwp: bool = False,
    ) -> "OpticalCircuit":
        if not isinstance(items, list):
            raise ValueError("circuit must be a JSON array of element objects")
        elements = [OpticalElement.from_json(x, allow_physical_hwp) for x in items]
        return cls(tuple(elements), detection_phase, mode_labels)


def bare_detectors(mode_labels: tuple[str, str] = ("Q0", "Q1")) -> OpticalCircuit:
    return OpticalCircuit((), 0.0, mode_labels)


def interferometer_circuit(phi: float) -> OpticalCircuit:
    """Phase shifter in the lower path, then the 50:50 beam splitter."""
    return OpticalCircuit((PhaseShifter(phi), Balanced50_50()), phi)


def equalized_interferometer(theta: float, phi: float) -> OpticalCircuit:
    """Equalizing beam splitter B_theta in front of the phase-swept interferometer."""
    return OpticalCircuit((RotationBS(theta), PhaseShifter(phi), Balanced50_50()), phi)


def polarization_interferometer(alpha: float, phi: float, physical_hwp: bool = False) -> OpticalCircuit:
    """HWP1, PBS with HWP2 on the reflected arm, phase shifter, 50:50 splitter.

    The PBS maps H/V onto the two arms one-to-one and is lossless, so it
    contributes no matrix of its own.
    """
    plate = PhysicalHWP(alpha) if physical_hwp else HalfWavePlate(alpha)
    return OpticalCircuit(
        (plate, HWP2FixedSwap(), PhaseShifter(phi), Balanced50_50()), phi, ("H", "V")
    )


def _evolve(rho: DensityOperator, u: np.ndarray) -> np.ndarray:
    return u @ rho.matrix @ u.conj().T


def run_circuit(rho: DensityOperator, circuit: OpticalCircuit) -> OutcomeDistribution:
    if rho.dim != 2:
        raise DimMismatch(f"optical circuits act on two modes, got dim {rho.dim}")
    state = make_density(_evolve(rho, circuit.pre_detection()))
    if circuit.interferometric:
        return outcome_probabilities(state, detector_basis(circuit.detection_phase))
    return outcome_probabilities(state, MeasurementBasis.computational(2))


def _check_qubit(rho: DensityOperator) -> None:
    if rho.dim != 2:
        raise DimMismatch(f"expected a two-mode state, got dim {rho.dim}")


def _population_gap(m: np.ndarray) -> float:
    return float((m[0, 0] - m[1, 1]).real)


def equalizing_angle(rho: DensityOperator) -> float:
    """Rotation-BS angle that levels the two output intensities.

    Solves (rho00 - rho11) cos 2theta = 2 Re(rho01) sin 2theta with atan2 and
    picks the root in [0, pi/2]; zero when the diagonal is already level.
    """
    _check_qubit(rho)
    m = rho.matrix
    gap = _population_gap(m)
    if abs(gap) <= EQUAL_TOL * 1e-3:
        return 0.0
    theta = (math.atan2(gap, 2.0 * m[0, 1].real) % math.pi) / 2.0
    after = _evolve(rho, rotation(theta))
    if abs(_population_gap(after)) > EQUAL_TOL:
        raise EqualizationUnreachable(abs(_population_gap(after)), f"theta = {theta}")
    return theta


def imaginary_offdiag_handling(rho: DensityOperator) -> tuple[float, float]:
    """Generic beam-splitter parameters (theta, phi) that level the outputs.

    phi follows the phase of rho01 so the splitter sees a real positive
    coherence; a real rho01 keeps phi = 0 and the rotation-BS angle.
    """
    _check_qubit(rho)
    m = rho.matrix
    gap = _population_gap(m)
    if abs(gap) <= EQUAL_TOL * 1e-3:
        return 0.0, 0.0
    g = complex(m[0, 1])
    if abs(g.imag) <= 1e-15:
        return equalizing_angle(rho), 0.0
    phi = math.atan2(g.imag, g.real) % (2 * math.pi)
    theta = (math.atan2(gap, 2.0 * abs(g)) % math.pi) / 2.0
    after = _evolve(rho, GenericBS(theta, phi).matrix)
    if abs(_population_gap(after)) > EQUAL_TOL:
        raise EqualizationUnreachable(abs(_population_gap(after)), f"theta = {theta}, phi = {phi}")
    return theta, phi


def feedback_equalize(
    rho: DensityOperator,
    element: Callable[[float], OpticalElement],
    lo: float = 0.0,
    hi: float = math.pi / 2,
    scan_points: int = 257,
) -> float:
    """Find the smallest setting that levels the output intensities.

    Only the two bare-detector intensities behind ``element(x)`` are used, so
    this is the route available when the state is unknown. The setting range
    is scanned for the first sign change of I0 - I1 and polished with Brent's
    method. Raises EqualizationUnreachable if no setting brings |I0 - I1|
    within 1e-9.
    """
    _check_qubit(rho)

    def gap(x: float) -> float:
        return float(run_circuit(rho, OpticalCircuit((element(x),))).probs @ [1.0, -1.0])

    xs = np.linspace(lo, hi, scan_points)
    gs = np.array([gap(x) for x in xs])
    hits = np.flatnonzero(np.abs(gs) <= EQUAL_TOL * 1e-3)
    crossings = np.flatnonzero(np.sign(gs[:-1]) * np.sign(gs[1:]) < 0)
    candidates = []
    if hits.size:
        candidates.append((xs[hits[0]], hits[0]))
    if crossings.size:
        k = crossings[0]
        candidates.append((brentq(gap, xs[k], xs[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps), k))
    if not candidates:
        raise EqualizationUnreachable(float(np.abs(gs).min()), "no sign change of I0 - I1 over the setting range")
    x = min(candidates, key=lambda c: (c[1], c[0]))[0]
    if abs(gap(x)) > EQUAL_TOL:
        raise EqualizationUnreachable(abs(gap(x)))
    return float(x)


@dataclass(frozen=True)
class DetectionRecord:
    shots: int
    counts: tuple[int, ...]
    seed: int | tuple[int, ...]

    def __post_init__(self):
        if sum(self.counts) != self.shots:
            raise ValueError(f"counts {self.counts} do not sum to shots {self.shots}")


def sample_detections(dist: OutcomeDistribution, shots: int, seed) -> DetectionRecord:
    """Multinomial photon counts from numpy's PCG64 generator.

    ``seed`` is an int or a tuple of ints (fed to ``SeedSequence``); the
    same (dist, shots, seed) always gives the same counts.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    p = np.asarray(dist.probs, dtype=float)
    rng = np.random.Generator(np.random.PCG64(seed if isinstance(seed, int) else list(seed)))
    counts = rng.multinomial(shots, p / p.sum())
    return DetectionRecord(int(shots), tuple(int(c) for c in counts), seed if isinstance(seed, int) else tuple(seed))


def estimate_distribution(rec: DetectionRecord) -> OutcomeDistribution:
    if rec.shots < 1:
        raise ValueError("shots must be positive")
    return OutcomeDistribution(np.asarray(rec.counts, dtype=float) / rec.shots)
