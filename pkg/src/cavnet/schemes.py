"""Entanglement-generation schemes: wiring, propagation, and detection.

A :class:`Scheme` bundles a register, an initial state, an ordered element
list, detectors, and the per-outcome local corrections plus target states
the outcomes should reach.  :func:`run` propagates the initial state through
every element, enumerates detector outcome combinations, and reports each
combination's probability, post-selected state, applied correction, and
fidelity against the registered target.

Builders cover:

* ``build_ghz_atoms`` -- one polarized photon through a two-arm
  interferometer whose arms visit alternating halves of an atom chain;
* ``build_w_pow2`` / ``build_w3_probabilistic`` / ``build_w3_deterministic``
  -- single-excitation (W) states via balanced fan-out over one cavity per
  atom and an interference network that erases which-path information;
* ``build_cluster_atoms`` -- a chained Mach-Zehnder where one arm of stage i
  passes cavity i, producing the linear cluster state;
* ``build_ghz_fields`` / ``build_field_cz_pair`` / ``build_field_graph`` --
  flying-atom versions entangling cavity fields, up to arbitrary graph
  states via one dispersive pass per edge;
* ``retry_walk`` -- the repeat-until-success analysis of chaining many
  imperfect flips, as an absorbing random walk.

Serialization: :func:`scheme_to_jsonable` / :func:`reports_to_jsonable`
render the documented JSON shape used by the command line front end.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields as dataclass_fields
from typing import Iterable, Sequence

import numpy as np

from . import elements as el
from . import qstate, verify
from .errors import (
    DegenerateCouplingError,
    InvalidConfigurationError,
    InvalidLabelError,
    LossyWiringError,
    ParameterError,
    ShapeError,
)
from .qstate import (
    KIND_ATOM_GE,
    KIND_ATOM_LR,
    KIND_FIELD,
    KIND_PATH,
    KIND_POL,
    PureState,
    Register,
    Subsystem,
)
from .verify import Graph, LocalCorrection

PATH = "path"
POL = "pol"

PROB_SUM_ATOL = 1e-9
FLYER_PURITY_ATOL = 1e-9


@dataclass(frozen=True)
class Scheme:
    """A fully wired experiment ready for :func:`run`."""

    name: str
    n: int
    register: Register
    initial: tuple[tuple[tuple[str, ...], np.ndarray], ...]
    initial_spec: tuple[dict, ...]
    elements: tuple[el.Element, ...]
    detectors: tuple[el.Detector, ...]
    corrections: dict[str, LocalCorrection]
    targets: dict[str, PureState | None]
    flying: tuple[str, ...]


@dataclass(frozen=True)
class OutcomeReport:
    """One detector outcome combination of a scheme run."""

    detector_id: str
    probability: float
    post_state: PureState | None
    corrected_state: PureState | None
    correction: LocalCorrection
    fidelity_vs_target: float | None


# --------------------------------------------------------------------------
# element application


def _embedded_path_matrix(dpath: int, ports: tuple[int, int], block: np.ndarray) -> np.ndarray:
    a, b = ports
    if a == b:
        raise ParameterError(f"ports must differ, got {ports}")
    for p in ports:
        if not 0 <= p < dpath:
            raise ParameterError(f"port {p} out of range for path of dim {dpath}")
    m = np.eye(dpath, dtype=complex)
    m[np.ix_([a, b], [a, b])] = block
    return m


def _path_controlled(dpath: int, port: int, block: np.ndarray) -> np.ndarray:
    """Block-diagonal unitary applying ``block`` only in one interferometer arm."""
    if not 0 <= port < dpath:
        raise ParameterError(f"port {port} out of range for path of dim {dpath}")
    d = block.shape[0]
    m = np.kron(np.eye(dpath, dtype=complex), np.eye(d, dtype=complex))
    s = slice(port * d, (port + 1) * d)
    m[s, s] = block
    return m


def _sector_mass(state: PureState, assignments: dict[str, str | int]) -> float:
    """Probability mass in the product sector fixed by ``assignments``."""
    register = state.register
    slicer: list = [slice(None)] * len(register)
    for label, outcome in assignments.items():
        pos = register.position(label)
        slicer[pos] = register.subsystems[pos].index_of(outcome)
    sector = state.amplitudes.reshape(register.dims)[tuple(slicer)]
    return float(np.sum(np.abs(sector) ** 2))


def _apply_element(state: PureState, item: el.Element) -> PureState:
    register = state.register
    if isinstance(item, el.Detector):
        return state

    if isinstance(item, el.BS):
        dpath = register.subsystem(PATH).dim
        m = _embedded_path_matrix(dpath, item.ports, el.bs_unitary(item.reflectivity))
        return qstate.apply_unitary(state, [PATH], m)

    if isinstance(item, el.PhaseShifter):
        dpath = register.subsystem(PATH).dim
        if not 0 <= item.port < dpath:
            raise ParameterError(f"port {item.port} out of range")
        m = np.eye(dpath, dtype=complex)
        m[item.port, item.port] = np.exp(1j * item.phase)
        return qstate.apply_unitary(state, [PATH], m)

    if isinstance(item, el.Reroute):
        dpath = register.subsystem(PATH).dim
        if _sector_mass(state, {PATH: item.dst}) > 1e-12:
            raise InvalidConfigurationError(
                f"reroute target port {item.dst} is already occupied"
            )
        m = np.eye(dpath, dtype=complex)
        m[[item.src, item.dst]] = m[[item.dst, item.src]]
        return qstate.apply_unitary(state, [PATH], m)

    if isinstance(item, el.PBS):
        dpath = register.subsystem(PATH).dim
        a, b = item.ports
        m = np.eye(dpath * 2, dtype=complex)
        ar, br = a * 2 + 1, b * 2 + 1
        m[ar, ar] = m[br, br] = 0.0
        m[ar, br] = m[br, ar] = 1.0
        return qstate.apply_unitary(state, [PATH, POL], m)

    if isinstance(item, el.PR):
        dpath = register.subsystem(PATH).dim
        m = _path_controlled(dpath, item.port, el.pr_unitary())
        return qstate.apply_unitary(state, [PATH, POL], m)

    if isinstance(item, el.CavityAtomBlock):
        block = el.cavity_atom_block_unitary()
        if item.port is None:
            return qstate.apply_unitary(state, [item.atom, POL], block)
        dpath = register.subsystem(PATH).dim
        m = _path_controlled(dpath, item.port, block)
        return qstate.apply_unitary(state, [PATH, item.atom, POL], m)

    if isinstance(item, el.FieldPiBlock):
        guard = {item.atom: "e", item.field: "1"}
        if item.port is not None:
            guard[PATH] = item.port
        if _sector_mass(state, guard) > el.DOUBLE_EXCITATION_EPS:
            raise InvalidConfigurationError(
                "resonant pi block reached with population in the doubly "
                f"excited |e,1> sector of ({item.atom}, {item.field})"
            )
        block = el.field_pi_block_unitary()
        if item.port is None:
            return qstate.apply_unitary(state, [item.atom, item.field], block)
        dpath = register.subsystem(PATH).dim
        m = _path_controlled(dpath, item.port, block)
        return qstate.apply_unitary(state, [PATH, item.atom, item.field], m)

    if isinstance(item, el.FieldHalfPiBlock):
        block = el.field_half_pi_block_unitary()
        if item.port is None:
            return qstate.apply_unitary(state, [item.atom, item.field], block)
        dpath = register.subsystem(PATH).dim
        m = _path_controlled(dpath, item.port, block)
        return qstate.apply_unitary(state, [PATH, item.atom, item.field], m)

    if isinstance(item, el.DispersiveBlock):
        block = el.dispersive_block_unitary()
        if item.port is None:
            return qstate.apply_unitary(state, [item.atom, item.field], block)
        dpath = register.subsystem(PATH).dim
        m = _path_controlled(dpath, item.port, block)
        return qstate.apply_unitary(state, [PATH, item.atom, item.field], m)

    if isinstance(item, el.RamseyZone):
        return qstate.apply_unitary(state, [item.atom], el.ramsey_unitary())

    if isinstance(item, el.ExternalPiPulse):
        return qstate.apply_unitary(state, [item.atom], el.external_pi_unitary())

    raise ParameterError(f"unknown element {item!r}")


def initial_state(scheme: Scheme) -> PureState:
    return qstate.from_factors(scheme.register, scheme.initial)


def propagate(scheme: Scheme, upto: int | None = None) -> PureState:
    """State after the first ``upto`` elements (all of them by default)."""
    state = initial_state(scheme)
    items = scheme.elements if upto is None else scheme.elements[:upto]
    for item in items:
        state = _apply_element(state, item)
    return state


def _strip_flyer(state: PureState, label: str) -> PureState:
    """Remove a flying subsystem that must be in a product with the rest."""
    sub = state.register.subsystem(label)
    probs = [
        qstate.projection_probability(state, label, out) for out in sub.basis_labels
    ]
    best = int(np.argmax(probs))
    prob, post = qstate.project_out(state, label, sub.basis_labels[best])
    if post is None or prob < 1.0 - FLYER_PURITY_ATOL:
        raise LossyWiringError(
            f"flying subsystem {label!r} is still entangled at detection "
            f"(dominant outcome probability {prob})"
        )
    return post


def run(scheme: Scheme) -> list[OutcomeReport]:
    """Propagate, detect, correct, and score every outcome combination.

    Detectors on the same subsystem are alternative outcomes; detectors on
    different subsystems are measured jointly, so the report list is the
    Cartesian product across subsystems.  Probabilities must account for
    the whole state (sum to 1 within 1e-9).
    """
    state = propagate(scheme)
    if not scheme.detectors:
        return []

    groups: dict[str, list[el.Detector]] = {}
    for det in scheme.detectors:
        groups.setdefault(det.subsystem, []).append(det)

    reports: list[OutcomeReport] = []
    total = 0.0
    for combo in itertools.product(*groups.values()):
        prob = 1.0
        st: PureState | None = state
        for det in combo:
            p, st = qstate.project_out(st, det.subsystem, det.outcome)
            prob *= p
            if st is None:
                prob = 0.0
                break
        if st is not None:
            for label in scheme.flying:
                if label in st.register.labels:
                    st = _strip_flyer(st, label)
        combo_id = ",".join(det.id for det in combo)
        correction = scheme.corrections.get(combo_id, LocalCorrection())
        corrected = correction.apply(st) if st is not None else None
        target = scheme.targets.get(combo_id)
        fid = (
            verify.fidelity(corrected, target)
            if corrected is not None and target is not None
            else None
        )
        reports.append(
            OutcomeReport(combo_id, prob, st, corrected, correction, fid)
        )
        total += prob

    if abs(total - 1.0) > PROB_SUM_ATOL:
        raise LossyWiringError(
            f"detector probabilities sum to {total!r}, scheme loses amplitude"
        )
    return reports


# --------------------------------------------------------------------------
# small construction helpers


def _basis_factor(register: Register, label: str, outcome: str) -> tuple[tuple[str, ...], np.ndarray]:
    sub = register.subsystem(label)
    vec = np.zeros(sub.dim, dtype=complex)
    vec[sub.index_of(outcome)] = 1.0
    return ((label,), vec)


def _plus_factor(label: str) -> tuple[tuple[str, ...], np.ndarray]:
    return ((label,), np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0))


def _pair_factor(field: str, atom: str) -> tuple[tuple[str, ...], np.ndarray]:
    """(|0,g> + |1,e>)/sqrt(2) over (field, atom)."""
    vec = np.zeros(4, dtype=complex)
    vec[0] = vec[3] = 1.0 / np.sqrt(2.0)
    return ((field, atom), vec)


def _hadamard_mesh(ports: Sequence[int]) -> list[el.BS]:
    """Balanced splitter mesh realizing the n-port Hadamard transform.

    ``n = len(ports)`` must be a power of two.  One 50/50 splitter per pair
    of ports whose indices differ in exactly one bit, one layer per bit;
    layers commute, and the whole mesh is self-inverse.  Fed from port 0 it
    fans a single excitation uniformly over all ports; run again it
    recombines n orthogonal branches so that every output port sees every
    branch with amplitude 1/sqrt(n) -- the which-path erasure needed ahead
    of the detectors.
    """
    n = len(ports)
    if n < 2 or n & (n - 1):
        raise ParameterError(f"Hadamard mesh needs a power-of-two port count, got {n}")
    mesh = []
    bit = 1
    while bit < n:
        for i in range(n):
            if not i & bit:
                mesh.append(el.BS(0.5, (ports[i], ports[i | bit])))
        bit <<= 1
    return mesh


def _hadamard_sign(j: int, k: int) -> int:
    return -1 if bin(j & k).count("1") % 2 else 1


def _fourier_tritter() -> np.ndarray:
    w = np.exp(2j * np.pi / 3.0)
    return np.array(
        [[1, 1, 1], [1, w, w * w], [1, w * w, w]], dtype=complex
    ) / np.sqrt(3.0)


def _two_mode_elements(w: np.ndarray, ports: tuple[int, int]) -> list[el.Element]:
    """Realize a 2x2 unitary as phase shifters around one beam splitter."""
    p, q = ports
    out: list[el.Element] = []

    def push_phase(port: int, phase: float) -> None:
        phase = float(np.angle(np.exp(1j * phase)))
        if abs(phase) > 1e-12:
            out.append(el.PhaseShifter(port, phase))

    if abs(w[0, 1]) < 1e-12:  # diagonal: pure phases
        push_phase(p, np.angle(w[0, 0]))
        push_phase(q, np.angle(w[1, 1]))
        return out
    if abs(w[0, 0]) < 1e-12:  # antidiagonal: phased swap, as BS-pi-BS
        push_phase(p, np.angle(w[1, 0]))
        push_phase(q, np.angle(w[0, 1]))
        out.append(el.BS(0.5, ports))
        out.append(el.PhaseShifter(q, np.pi))
        out.append(el.BS(0.5, ports))
        return out
    reflectivity = float(abs(w[0, 1]) ** 2)
    c = float(np.angle(w[0, 0]))
    d = float(np.angle(w[0, 1]))
    b = float(np.angle(w[1, 0])) - c
    push_phase(p, c)
    push_phase(q, d)
    out.append(el.BS(reflectivity, ports))
    push_phase(q, b)
    return out


def _unitary_mesh(v: np.ndarray, ports: Sequence[int]) -> list[el.Element]:
    """Decompose an arbitrary port unitary into splitters and phase shifters.

    Left-multiplying Givens rotations reduce ``v`` to a phase diagonal; the
    element list plays the factors back so that applying it to the path
    equals applying ``v``.
    """
    v = np.asarray(v, dtype=complex)
    n = v.shape[0]
    if v.shape != (n, n) or len(ports) != n:
        raise ShapeError("unitary and port list sizes disagree")
    u = v.copy()
    rotations: list[tuple[int, int, np.ndarray]] = []
    for col in range(n - 1):
        for row in range(col + 1, n):
            a, b = u[col, col], u[row, col]
            if abs(b) <= 1e-15:
                continue
            nrm = float(np.hypot(abs(a), abs(b)))
            g = np.array([[a.conjugate(), b.conjugate()], [-b, a]], dtype=complex) / nrm
            u[[col, row], :] = g @ u[[col, row], :]
            rotations.append((col, row, g))

    out: list[el.Element] = []
    for k in range(n):
        phase = float(np.angle(u[k, k]))
        if abs(phase) > 1e-12:
            out.append(el.PhaseShifter(ports[k], phase))
    for i, j, g in reversed(rotations):
        out.extend(_two_mode_elements(g.conj().T, (ports[i], ports[j])))
    return out


def mesh_matrix(items: Iterable[el.Element], dpath: int) -> np.ndarray:
    """Compose BS/PhaseShifter/Reroute elements into one path-space matrix."""
    m = np.eye(dpath, dtype=complex)
    for item in items:
        if isinstance(item, el.BS):
            m = _embedded_path_matrix(dpath, item.ports, el.bs_unitary(item.reflectivity)) @ m
        elif isinstance(item, el.PhaseShifter):
            p = np.eye(dpath, dtype=complex)
            p[item.port, item.port] = np.exp(1j * item.phase)
            m = p @ m
        elif isinstance(item, el.Reroute):
            p = np.eye(dpath, dtype=complex)
            p[[item.src, item.dst]] = p[[item.dst, item.src]]
            m = p @ m
        else:
            raise ParameterError(f"{item!r} is not a path-only element")
    return m


# --------------------------------------------------------------------------
# atom-entangling schemes (flying polarized photon)


def _atom_register(n: int, dpath: int) -> Register:
    subs = [Subsystem(f"atom{i + 1}", KIND_ATOM_LR) for i in range(n)]
    subs.append(Subsystem(PATH, KIND_PATH, dpath))
    subs.append(Subsystem(POL, KIND_POL))
    return Register(subs)


def _atoms_only(register: Register) -> Register:
    return Register(
        sub for sub in register.subsystems if sub.kind == KIND_ATOM_LR
    )


def build_ghz_atoms(n: int) -> Scheme:
    """Photon-mediated GHZ state over an even number of L/R atoms.

    The atoms are prepared in the pairwise pattern L L R R L L ...; a
    single L-polarized photon is split over two arms, the first arm visits
    the odd-numbered atoms and the second the even-numbered ones, and the
    arms recombine on a final balanced splitter.  Both detector outcomes
    occur with probability 1/2 and hold a GHZ state up to a recorded X
    layer (the relative sign is + at D1 and - at D2).
    """
    if n < 2 or n % 2:
        raise ParameterError(f"this scheme needs an even atom count >= 2, got {n}")
    register = _atom_register(n, dpath=2)
    pattern = ["L" if (i % 4) in (0, 1) else "R" for i in range(n)]

    factors = [_basis_factor(register, f"atom{i + 1}", pattern[i]) for i in range(n)]
    factors.append(_basis_factor(register, PATH, "0"))
    factors.append(_basis_factor(register, POL, "L"))
    spec = tuple(
        [{"subsystems": [f"atom{i + 1}"], "state": pattern[i]} for i in range(n)]
        + [{"subsystems": [PATH], "state": "0"}, {"subsystems": [POL], "state": "L"}]
    )

    items: list[el.Element] = [el.BS(0.5, (0, 1))]
    for i in range(0, n, 2):  # odd-numbered atoms ride arm 0
        items.append(el.CavityAtomBlock(f"atom{i + 1}", port=0))
    for i in range(1, n, 2):
        items.append(el.CavityAtomBlock(f"atom{i + 1}", port=1))
    items.append(el.BS(0.5, (0, 1)))

    detectors = (
        el.Detector("D1", PATH, 0),
        el.Detector("D2", PATH, 1),
    )
    # arm 1 visits the even-numbered atoms, so only those flip in branch 1
    branch1 = [
        pattern[i] if i % 2 == 0 else ("R" if pattern[i] == "L" else "L")
        for i in range(n)
    ]
    x_layer = LocalCorrection(
        tuple((f"atom{i + 1}", "X") for i in range(n) if branch1[i] == "L")
    )
    atoms = _atoms_only(register)
    targets = {
        "D1": verify.ghz_target(n, 1, "R", atoms),
        "D2": verify.ghz_target(n, -1, "R", atoms),
    }
    return Scheme(
        name="ghz-atoms",
        n=n,
        register=register,
        initial=tuple(factors),
        initial_spec=spec,
        elements=tuple(items),
        detectors=detectors,
        corrections={"D1": x_layer, "D2": x_layer},
        targets=targets,
        flying=(POL,),
    )


def build_w_pow2(n: int) -> Scheme:
    """W state over ``n = 2**k`` atoms from one photon and one cavity per atom.

    A Hadamard splitter mesh fans the photon over n paths, each path flips
    its own atom, and the same mesh recombines the paths.  Every detector
    fires with probability 1/n; the recorded correction is the Z layer
    matching that output port's sign pattern.
    """
    if n < 2 or n & (n - 1):
        raise ParameterError(f"this scheme needs a power-of-two atom count, got {n}")
    register = _atom_register(n, dpath=n)
    factors = [_basis_factor(register, f"atom{i + 1}", "L") for i in range(n)]
    factors.append(_basis_factor(register, PATH, "0"))
    factors.append(_basis_factor(register, POL, "L"))
    spec = tuple(
        [{"subsystems": [f"atom{i + 1}"], "state": "L"} for i in range(n)]
        + [{"subsystems": [PATH], "state": "0"}, {"subsystems": [POL], "state": "L"}]
    )

    mesh = _hadamard_mesh(range(n))
    items: list[el.Element] = list(mesh)
    for k in range(n):
        items.append(el.CavityAtomBlock(f"atom{k + 1}", port=k))
    items.extend(mesh)

    detectors = tuple(el.Detector(f"D{j + 1}", PATH, j) for j in range(n))
    atoms = _atoms_only(register)
    corrections = {}
    targets = {}
    for j in range(n):
        corrections[f"D{j + 1}"] = LocalCorrection(
            tuple(
                (f"atom{k + 1}", "Z")
                for k in range(n)
                if _hadamard_sign(j, k) < 0
            )
        )
        targets[f"D{j + 1}"] = verify.w_target(n, atoms)
    return Scheme(
        name="w",
        n=n,
        register=register,
        initial=tuple(factors),
        initial_spec=spec,
        elements=tuple(items),
        detectors=detectors,
        corrections=corrections,
        targets=targets,
        flying=(POL,),
    )


def build_w3_probabilistic() -> Scheme:
    """Three-atom W by sacrificing one port of the four-path scheme.

    The fourth cavity is replaced by a dedicated detector D5: the photon
    amplitude on that path leaves the interferometer before recombination.
    D5 fires with probability 1/4 (failure); each of D1..D4 fires with
    probability 3/16 and yields the three-atom W after its Z layer.
    """
    n = 3
    register = _atom_register(n, dpath=5)
    factors = [_basis_factor(register, f"atom{i + 1}", "L") for i in range(n)]
    factors.append(_basis_factor(register, PATH, "0"))
    factors.append(_basis_factor(register, POL, "L"))
    spec = tuple(
        [{"subsystems": [f"atom{i + 1}"], "state": "L"} for i in range(n)]
        + [{"subsystems": [PATH], "state": "0"}, {"subsystems": [POL], "state": "L"}]
    )

    mesh = _hadamard_mesh(range(4))
    items: list[el.Element] = list(mesh)
    for k in range(3):
        items.append(el.CavityAtomBlock(f"atom{k + 1}", port=k))
    items.append(el.Reroute(3, 4))
    items.extend(mesh)

    detectors = tuple(el.Detector(f"D{j + 1}", PATH, j) for j in range(4)) + (
        el.Detector("D5", PATH, 4),
    )
    atoms = _atoms_only(register)
    corrections = {}
    targets: dict[str, PureState | None] = {"D5": None}
    for j in range(4):
        corrections[f"D{j + 1}"] = LocalCorrection(
            tuple(
                (f"atom{k + 1}", "Z")
                for k in range(3)
                if _hadamard_sign(j, k) < 0
            )
        )
        targets[f"D{j + 1}"] = verify.w_target(3, atoms)
    return Scheme(
        name="w3-prob",
        n=n,
        register=register,
        initial=tuple(factors),
        initial_spec=spec,
        elements=tuple(items),
        detectors=detectors,
        corrections=corrections,
        targets=targets,
        flying=(POL,),
    )


def build_w3_deterministic() -> Scheme:
    """Deterministic three-atom W: uneven fan-out plus a balanced tritter.

    Fan-out is a reflectivity-1/3 splitter followed by a 50/50; the three
    return paths recombine through a three-port transform all of whose
    entries have modulus 1/sqrt(3) (a Fourier tritter, realized here as
    splitters plus fixed phase shifters).  Every detector fires with
    probability 1/3 and reaches the W state after a per-atom phase layer.
    """
    n = 3
    register = _atom_register(n, dpath=3)
    factors = [_basis_factor(register, f"atom{i + 1}", "L") for i in range(n)]
    factors.append(_basis_factor(register, PATH, "0"))
    factors.append(_basis_factor(register, POL, "L"))
    spec = tuple(
        [{"subsystems": [f"atom{i + 1}"], "state": "L"} for i in range(n)]
        + [{"subsystems": [PATH], "state": "0"}, {"subsystems": [POL], "state": "L"}]
    )

    tritter = _fourier_tritter()
    items: list[el.Element] = [el.BS(1.0 / 3.0, (0, 1)), el.BS(0.5, (0, 2))]
    for k in range(3):
        items.append(el.CavityAtomBlock(f"atom{k + 1}", port=k))
    items.extend(_unitary_mesh(tritter, (0, 1, 2)))

    detectors = tuple(el.Detector(f"D{j + 1}", PATH, j) for j in range(3))
    atoms = _atoms_only(register)
    corrections = {}
    targets = {}
    for j in range(3):
        corrections[f"D{j + 1}"] = LocalCorrection(
            tuple(
                (f"atom{k + 1}", ("phase", float(-np.angle(tritter[j, k]))))
                for k in range(3)
                if abs(np.angle(tritter[j, k])) > 1e-12
            )
        )
        targets[f"D{j + 1}"] = verify.w_target(3, atoms)
    return Scheme(
        name="w3-det",
        n=n,
        register=register,
        initial=tuple(factors),
        initial_spec=spec,
        elements=tuple(items),
        detectors=detectors,
        corrections=corrections,
        targets=targets,
        flying=(POL,),
    )


def build_cluster_atoms(n: int) -> Scheme:
    """Linear cluster state from a chained two-arm interferometer.

    Stage i sends one arm through cavity i (atom prepared |L>) followed by
    a polarization rotator restoring the input polarization, then mixes the
    arms on the next balanced splitter.  After stage n the outputs land on
    D1/D2 with probability 1/2 each; D1 holds the n-qubit linear cluster
    state directly and D2 needs only Z on the last atom.

    The two-stage walkthrough: after the first splitter the arm amplitudes
    are (1,1)/sqrt(2); stage 1 flips atom 1 only in the cavity arm, and the
    next splitter maps the pair (|L>, |R>) of atom-1 branches to
    (|L>+|R>, |L>-|R>)/sqrt(2) on the two arms.  Each further stage repeats
    this with the next atom, which is exactly the recursion building
    CZ(i,i+1) products on |+>^n: the D1 amplitudes for n=2 are
    (1, 1, 1, -1)/2 over (LL, LR, RL, RR).
    """
    if n < 1:
        raise ParameterError(f"cluster chain needs n >= 1, got {n}")
    register = _atom_register(n, dpath=2)
    factors = [_basis_factor(register, f"atom{i + 1}", "L") for i in range(n)]
    factors.append(_basis_factor(register, PATH, "0"))
    factors.append(_basis_factor(register, POL, "L"))
    spec = tuple(
        [{"subsystems": [f"atom{i + 1}"], "state": "L"} for i in range(n)]
        + [{"subsystems": [PATH], "state": "0"}, {"subsystems": [POL], "state": "L"}]
    )

    items: list[el.Element] = [el.BS(0.5, (0, 1))]
    for i in range(n):
        items.append(el.CavityAtomBlock(f"atom{i + 1}", port=1))
        items.append(el.PR(port=1))
        items.append(el.BS(0.5, (0, 1)))

    detectors = (
        el.Detector("D1", PATH, 0),
        el.Detector("D2", PATH, 1),
    )
    atoms = _atoms_only(register)
    target = verify.graph_target(Graph.path(n), KIND_ATOM_LR, atoms)
    return Scheme(
        name="cluster",
        n=n,
        register=register,
        initial=tuple(factors),
        initial_spec=spec,
        elements=tuple(items),
        detectors=detectors,
        corrections={
            "D1": LocalCorrection(),
            "D2": LocalCorrection(((f"atom{n}", "Z"),)),
        },
        targets={"D1": target, "D2": target},
        flying=(POL,),
    )


# --------------------------------------------------------------------------
# field-entangling schemes (flying ladder atom)


def build_ghz_fields(n: int) -> Scheme:
    """GHZ state over cavity photon-number qubits, mediated by one atom.

    Mirror image of :func:`build_ghz_atoms`: the cavities are prepared in
    the pairwise pattern |1 1 0 0 1 1 ...>, a ground-state atom is split
    over two momentum paths, and each arm exchanges excitation with its
    cavities through resonant pi passes.  The alternating 1/0 pattern seen
    along each arm keeps the atom out of the doubly excited sector.
    """
    if n < 2 or n % 2:
        raise ParameterError(f"this scheme needs an even cavity count >= 2, got {n}")
    subs = [Subsystem(f"field{i + 1}", KIND_FIELD) for i in range(n)]
    subs.append(Subsystem(PATH, KIND_PATH, 2))
    subs.append(Subsystem("atom", KIND_ATOM_GE))
    register = Register(subs)

    pattern = ["1" if (i % 4) in (0, 1) else "0" for i in range(n)]
    factors = [_basis_factor(register, f"field{i + 1}", pattern[i]) for i in range(n)]
    factors.append(_basis_factor(register, PATH, "0"))
    factors.append(_basis_factor(register, "atom", "g"))
    spec = tuple(
        [{"subsystems": [f"field{i + 1}"], "state": pattern[i]} for i in range(n)]
        + [{"subsystems": [PATH], "state": "0"}, {"subsystems": ["atom"], "state": "g"}]
    )

    items: list[el.Element] = [el.BS(0.5, (0, 1))]
    for i in range(0, n, 2):
        items.append(el.FieldPiBlock("atom", f"field{i + 1}", port=0))
    for i in range(1, n, 2):
        items.append(el.FieldPiBlock("atom", f"field{i + 1}", port=1))
    items.append(el.BS(0.5, (0, 1)))

    detectors = (
        el.Detector("D1", PATH, 0),
        el.Detector("D2", PATH, 1),
    )
    # arm 1 exchanges with the even-numbered cavities only
    branch1 = [
        pattern[i] if i % 2 == 0 else ("1" if pattern[i] == "0" else "0")
        for i in range(n)
    ]
    x_layer = LocalCorrection(
        tuple((f"field{i + 1}", "X") for i in range(n) if branch1[i] == "1")
    )
    fields = Register(sub for sub in register.subsystems if sub.kind == KIND_FIELD)
    targets = {
        "D1": verify.ghz_target(n, 1, "0", fields),
        "D2": verify.ghz_target(n, -1, "0", fields),
    }
    return Scheme(
        name="ghz-fields",
        n=n,
        register=register,
        initial=tuple(factors),
        initial_spec=spec,
        elements=tuple(items),
        detectors=detectors,
        corrections={"D1": x_layer, "D2": x_layer},
        targets=targets,
        flying=("atom",),
    )


def build_field_cz_pair() -> Scheme:
    """Entangling gate between two cavity fields carried by one atom.

    Cavity 1 holds one photon, cavity 2 the superposition (|0>+|1>)/sqrt(2).
    A half-pi pass entangles the atom with cavity 1, an external pi pulse
    swaps g and e, a dispersive pass imprints the conditional phase on
    cavity 2, and a Ramsey zone rotates the atom before it is measured.
    Both atom outcomes occur with probability 1/2 and leave the fields in
    the two-qubit graph state after the recorded correction (Z on cavity 1
    for outcome e).
    """
    register = Register(
        (
            Subsystem("field1", KIND_FIELD),
            Subsystem("field2", KIND_FIELD),
            Subsystem("atom", KIND_ATOM_GE),
        )
    )
    factors = [
        _basis_factor(register, "field1", "1"),
        _plus_factor("field2"),
        _basis_factor(register, "atom", "g"),
    ]
    spec = (
        {"subsystems": ["field1"], "state": "1"},
        {"subsystems": ["field2"], "state": "+"},
        {"subsystems": ["atom"], "state": "g"},
    )
    items = (
        el.FieldHalfPiBlock("atom", "field1"),
        el.ExternalPiPulse("atom"),
        el.DispersiveBlock("atom", "field2"),
        el.RamseyZone("atom"),
    )
    detectors = (
        el.Detector("Dg", "atom", "g"),
        el.Detector("De", "atom", "e"),
    )
    fields = Register(sub for sub in register.subsystems if sub.kind == KIND_FIELD)
    target = verify.graph_target(Graph.path(2), KIND_FIELD, fields)
    return Scheme(
        name="field-cz",
        n=2,
        register=register,
        initial=tuple(factors),
        initial_spec=spec,
        elements=items,
        detectors=detectors,
        corrections={
            "Dg": LocalCorrection(),
            "De": LocalCorrection((("field1", "Z"),)),
        },
        targets={"Dg": target, "De": target},
        flying=(),
    )


def _graph_for_kind(kind: str, n: int) -> Graph:
    if kind == "star":
        if n < 2:
            raise ParameterError("star graph needs n >= 2")
        return Graph.star(n)
    if kind == "linear":
        if n < 2:
            raise ParameterError("linear graph needs n >= 2")
        return Graph.path(n)
    if kind == "ring":
        return Graph.ring(n)
    raise ParameterError(f"unknown graph kind {kind!r}")


def build_field_graph(
    kind: str | None = None,
    n: int | None = None,
    graph: Graph | None = None,
) -> Scheme:
    """Graph state over cavity fields, one dispersive pass per edge.

    Named kinds follow the sequential recipes: ``star`` keeps cavity 1 in
    (|0>+|1>)/sqrt(2) and sends atom j (entangled with its own cavity j)
    through cavity 1; ``linear`` sends atom j through cavity j-1; ``ring``
    closes the chain by also sending atom 1 through cavity n.  An explicit
    ``graph`` uses one cavity-atom pair per vertex and routes the
    larger-vertex atom of every edge through the smaller vertex's cavity.
    Measuring the atoms leaves the fields in the graph state after the
    recorded per-field Z corrections (Z on field j when atom j reads e);
    every one of the ``2**(measured atoms)`` outcome combinations occurs
    with the same probability.
    """
    if graph is not None:
        if kind is not None or n is not None:
            raise ParameterError("pass either kind/n or an explicit graph, not both")
        target_graph = graph
        n = graph.vertices
        scheme_name = "graph-custom"
        paired = list(range(n))  # every vertex carries an atom
        passes = [
            (max(u, v), min(u, v)) for u, v in sorted(target_graph.edges)
        ]
    else:
        if kind is None or n is None:
            raise ParameterError("need kind and n when no explicit graph is given")
        target_graph = _graph_for_kind(kind, n)
        scheme_name = f"graph-{kind}"
        if kind == "star":
            paired = list(range(1, n))
            passes = [(j, 0) for j in range(1, n)]
        elif kind == "linear":
            paired = list(range(1, n))
            passes = [(j, j - 1) for j in range(1, n)]
        else:  # ring
            paired = list(range(n))
            passes = [(j, j - 1) for j in range(1, n)] + [(0, n - 1)]

    subs: list[Subsystem] = []
    factors: list[tuple[tuple[str, ...], np.ndarray]] = []
    spec: list[dict] = []
    paired_set = set(paired)
    for v in range(n):
        field_label = f"field{v + 1}"
        subs.append(Subsystem(field_label, KIND_FIELD))
        if v in paired_set:
            atom_label = f"atom{v + 1}"
            subs.append(Subsystem(atom_label, KIND_ATOM_GE))
            factors.append(_pair_factor(field_label, atom_label))
            spec.append(
                {"subsystems": [field_label, atom_label], "state": "pair"}
            )
        else:
            factors.append(_plus_factor(field_label))
            spec.append({"subsystems": [field_label], "state": "+"})
    register = Register(subs)

    items: list[el.Element] = []
    for atom_vertex, field_vertex in passes:
        items.append(
            el.DispersiveBlock(f"atom{atom_vertex + 1}", f"field{field_vertex + 1}")
        )
    for v in paired:
        items.append(el.RamseyZone(f"atom{v + 1}"))

    detectors: list[el.Detector] = []
    for v in paired:
        detectors.append(el.Detector(f"D{v + 1}g", f"atom{v + 1}", "g"))
        detectors.append(el.Detector(f"D{v + 1}e", f"atom{v + 1}", "e"))

    fields = Register(sub for sub in register.subsystems if sub.kind == KIND_FIELD)
    target = verify.graph_target(target_graph, KIND_FIELD, fields)
    corrections: dict[str, LocalCorrection] = {}
    targets: dict[str, PureState | None] = {}
    for combo in itertools.product(*(["g", "e"] for _ in paired)):
        combo_id = ",".join(
            f"D{v + 1}{out}" for v, out in zip(paired, combo)
        )
        corrections[combo_id] = LocalCorrection(
            tuple(
                (f"field{v + 1}", "Z")
                for v, out in zip(paired, combo)
                if out == "e"
            )
        )
        targets[combo_id] = target
    return Scheme(
        name=scheme_name,
        n=n,
        register=register,
        initial=tuple(factors),
        initial_spec=tuple(spec),
        elements=tuple(items),
        detectors=tuple(detectors),
        corrections=corrections,
        targets=targets,
        flying=(),
    )


# --------------------------------------------------------------------------
# repeat-until-success walk


@dataclass(frozen=True)
class RetryWalkParams:
    """Absorbing walk over a chain of imperfect flip blocks.

    Positions 0..n+1: 0 is the source side (always steps forward), 1..n are
    the cavities (forward with probability ``p_flip``, otherwise backward),
    n+1 is the detector and absorbs.  The walk starts at cavity 1 and every
    transition, including the bounce off position 0, counts as one step.
    """

    p_flip: float
    n_cavities: int
    max_steps: int = 10_000

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_flip <= 1.0:
            raise ParameterError(f"p_flip must lie in [0, 1], got {self.p_flip}")
        if self.p_flip == 0.0:
            raise DegenerateCouplingError("p_flip = 0 never advances the walk")
        if self.n_cavities < 1:
            raise ParameterError(f"need at least one cavity, got {self.n_cavities}")
        if self.max_steps < 1:
            raise ParameterError(f"max_steps must be positive, got {self.max_steps}")


@dataclass(frozen=True)
class RetryWalkResult:
    success_prob: float
    expected_steps: float
    conditional_fidelity: float


def _walk_matrix(params: RetryWalkParams) -> np.ndarray:
    n, p = params.n_cavities, params.p_flip
    m = np.zeros((n + 2, n + 2))
    m[0, 1] = 1.0
    for j in range(1, n + 1):
        m[j, j + 1] = p
        m[j, j - 1] = 1.0 - p
    m[n + 1, n + 1] = 1.0
    return m


def retry_walk(params: RetryWalkParams) -> RetryWalkResult:
    """Success probability within ``max_steps`` and the mean step count.

    ``success_prob`` iterates the chain's distribution; ``expected_steps``
    solves the linear hitting-time system and so refers to the unlimited
    walk (finite for every ``p_flip > 0``).  A detected photon has made
    exactly the intended sequence of net forward flips, so the conditional
    fidelity of the delivered state is 1 identically: wrong turns cost
    time, never quality.
    """
    m = _walk_matrix(params)
    n = params.n_cavities
    dist = np.zeros(n + 2)
    dist[1] = 1.0
    for _ in range(params.max_steps):
        dist = dist @ m
        if dist[n + 1] >= 1.0 - 1e-15:
            break
    success = float(dist[n + 1])

    transient = m[: n + 1, : n + 1]
    times = np.linalg.solve(np.eye(n + 1) - transient, np.ones(n + 1))
    return RetryWalkResult(
        success_prob=success,
        expected_steps=float(times[1]),
        conditional_fidelity=1.0,
    )


def retry_walk_mc(
    params: RetryWalkParams, trajectories: int, seed: int
) -> float:
    """Monte-Carlo estimate of ``success_prob`` over independent walkers."""
    if trajectories < 1:
        raise ParameterError("need at least one trajectory")
    rng = np.random.default_rng(seed)
    n, p = params.n_cavities, params.p_flip
    pos = np.ones(trajectories, dtype=np.int64)
    absorbed = 0
    for _ in range(params.max_steps):
        if pos.size == 0:
            break
        forward = rng.random(pos.size) < p
        pos = np.where(pos == 0, 1, np.where(forward, pos + 1, pos - 1))
        done = pos == n + 1
        hits = int(np.count_nonzero(done))
        if hits:
            absorbed += hits
            pos = pos[~done]
    return absorbed / trajectories


# --------------------------------------------------------------------------
# serialization


def _element_to_jsonable(item: el.Element) -> dict:
    out: dict = {"type": type(item).__name__}
    for f in dataclass_fields(item):
        value = getattr(item, f.name)
        if isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out


def scheme_to_jsonable(scheme: Scheme) -> dict:
    return {
        "name": scheme.name,
        "n": scheme.n,
        "elements": [_element_to_jsonable(item) for item in scheme.elements],
        "initial": [dict(entry) for entry in scheme.initial_spec],
    }


def _state_to_jsonable(state: PureState | None) -> list | None:
    if state is None:
        return None
    return [[float(a.real), float(a.imag)] for a in state.amplitudes]


def reports_to_jsonable(reports: Sequence[OutcomeReport]) -> list[dict]:
    out = []
    for rep in reports:
        out.append(
            {
                "detector": rep.detector_id,
                "probability": rep.probability,
                "fidelity": rep.fidelity_vs_target,
                "correction": rep.correction.describe(),
                "corrected_state": _state_to_jsonable(rep.corrected_state),
            }
        )
    return out


def run_report(scheme: Scheme) -> dict:
    """Scheme plus outcomes in the documented JSON shape."""
    return {
        "scheme": scheme_to_jsonable(scheme),
        "outcomes": reports_to_jsonable(run(scheme)),
    }
