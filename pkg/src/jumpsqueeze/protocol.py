"""Jump/wait/shift protocol sequences and their execution on the exact
Fock backend and on the fast symplectic (Gaussian) accumulator.

All Fock-backend states are kept in the eigenbasis of the instantaneous
trap: a frequency jump multiplies the state by the squeeze operator that
re-expresses it in the new basis (the wave function itself is unchanged
by a sudden jump), so waits stay diagonal.  Jumps are treated as
instantaneous; the hardware switching time is a validity condition of the
sudden approximation, not simulated.
"""

import cmath
import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from . import fock
from .bogoliubov import (BogoliubovPair, bogoliubov_from_jump, compose_jump,
                         compose_wait, squeeze_params_from_pair)
from .constants import HBAR, TWO_PI
from .errors import ConfigError, TruncationError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class FrequencyJump:
    """Sudden change of the trap frequency to ``omega_new`` (rad/s)."""
    omega_new: float

    def __post_init__(self):
        if not self.omega_new > 0:
            raise ValueError(f"jump target frequency must be positive, "
                             f"got {self.omega_new}")


@dataclass(frozen=True)
class Wait:
    """Free oscillation for ``tau`` seconds at the current frequency."""
    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise ValueError(f"wait time must be finite and >= 0, got {self.tau}")


@dataclass(frozen=True)
class ShiftOrigin:
    """Sudden translation of the potential minimum by ``d`` meters."""
    d: float

    def __post_init__(self):
        if not math.isfinite(self.d):
            raise ValueError(f"shift distance must be finite, got {self.d}")


@dataclass(frozen=True)
class UnshiftOrigin:
    """Return the potential minimum by the most recent unmatched shift."""


ProtocolStep = Union[FrequencyJump, Wait, ShiftOrigin, UnshiftOrigin]


@dataclass(frozen=True)
class Protocol:
    """An ordered jump/wait/shift sequence starting at ``omega_initial``."""
    omega_initial: float
    steps: Tuple[ProtocolStep, ...]

    def __post_init__(self):
        if not self.omega_initial > 0:
            raise ValueError("initial frequency must be positive")
        object.__setattr__(self, "steps", tuple(self.steps))
        open_shifts = 0
        total_wait = 0.0
        for i, step in enumerate(self.steps):
            if isinstance(step, ShiftOrigin):
                open_shifts += 1
            elif isinstance(step, UnshiftOrigin):
                if open_shifts == 0:
                    raise ValueError(
                        f"step {i}: unshift without an unmatched shift")
                open_shifts -= 1
            elif isinstance(step, Wait):
                total_wait += step.tau
            elif not isinstance(step, FrequencyJump):
                raise TypeError(f"step {i}: unknown step type {type(step)}")
        if not math.isfinite(total_wait):
            raise ValueError("total wait time must be finite")

    def total_wait(self):
        return sum(s.tau for s in self.steps if isinstance(s, Wait))

    def inverse(self):
        """Formal inverse: reversed steps with inverted jumps and shifts,
        and waits completed to full oscillation periods."""
        omega = self.omega_initial
        shift_stack = []
        annotated = []
        for step in self.steps:
            if isinstance(step, FrequencyJump):
                annotated.append((step, omega))
                omega = step.omega_new
            elif isinstance(step, ShiftOrigin):
                shift_stack.append(step.d)
                annotated.append((step, omega))
            elif isinstance(step, UnshiftOrigin):
                annotated.append((step, shift_stack.pop()))
            else:
                annotated.append((step, omega))
        inverted = []
        for step, extra in reversed(annotated):
            if isinstance(step, FrequencyJump):
                inverted.append(FrequencyJump(extra))
            elif isinstance(step, Wait):
                omega_here = extra
                period = TWO_PI / omega_here
                remainder = step.tau % period
                inverted.append(Wait(0.0 if remainder == 0 else period - remainder))
            elif isinstance(step, ShiftOrigin):
                inverted.append(ShiftOrigin(-step.d))
            else:
                inverted.append(ShiftOrigin(extra))
        return Protocol(omega, tuple(inverted))


@dataclass(frozen=True)
class ProtocolResult:
    """Outcome of a protocol run.

    ``pair`` and ``displacement`` summarize the Gaussian action in the
    frame at the end of the protocol (displacement measured from the
    current trap minimum); ``final_rho`` is the exact density matrix when
    the Fock backend ran, else None.
    """
    pair: BogoliubovPair
    displacement: complex
    elapsed: float
    final_omega: float
    final_rho: Optional[np.ndarray] = None


def amplified_alpha(alpha_i, r):
    """Amplified displacement alpha_i * exp(2r) * exp(i pi) produced by
    squeezing, waiting a quarter period and anti-squeezing around a
    displacement."""
    return complex(alpha_i) * math.exp(2.0 * r) * cmath.exp(1j * math.pi)


def _alpha_units(omega, mass, calibration):
    """Meters-per-alpha conversion 2 * calibration * x0 at ``omega``."""
    return 2.0 * calibration * math.sqrt(HBAR / (2.0 * mass * omega))


def run_symplectic(protocol, params):
    """Run a protocol on the Gaussian accumulator.

    Tracks the Bogoliubov pair and the coherent displacement (relative to
    the instantaneous trap minimum, in the instantaneous frame's units).
    """
    pair = BogoliubovPair.identity()
    alpha = 0.0 + 0.0j
    omega = protocol.omega_initial
    elapsed = 0.0
    shift_stack = []
    for step in protocol.steps:
        if isinstance(step, FrequencyJump):
            jump, _ = bogoliubov_from_jump(omega, step.omega_new)
            pair = compose_jump(pair, jump)
            alpha = jump.u * alpha - jump.v * alpha.conjugate()
            omega = step.omega_new
        elif isinstance(step, Wait):
            phase = omega * step.tau
            pair = compose_wait(pair, phase)
            alpha *= cmath.exp(-1j * phase)
            elapsed += step.tau
        elif isinstance(step, ShiftOrigin):
            c = step.d / _alpha_units(omega, params.mass, params.calibration)
            shift_stack.append(step.d)
            alpha += c
        else:
            d = shift_stack.pop()
            alpha -= d / _alpha_units(omega, params.mass, params.calibration)
    return ProtocolResult(pair, alpha, elapsed, omega)


def run_fock(protocol, params, initial=None, dim=fock.DEFAULT_DIM):
    """Run a protocol on the exact Fock backend.

    Parameters
    ----------
    protocol : Protocol
    params : TrapParams
        Needed to convert trap shifts into displacement amplitudes.
    initial : ndarray, optional
        Initial density matrix (default: ground state).
    dim : int
        Truncation dimension.

    Returns
    -------
    ProtocolResult
        With ``final_rho`` set; the symplectic summary is accumulated
        alongside for cross-checks.

    Raises
    ------
    TruncationError
        Naming the offending step, when any intermediate state trips the
        tail-mass guard or an operator cannot be built at ``dim``.
    """
    if initial is None:
        rho = fock.thermal_density_matrix(0.0, dim)
    else:
        rho = fock.validate_density(np.asarray(initial, dtype=complex))
        if rho.shape[0] != dim:
            raise ValueError(f"initial state dimension {rho.shape[0]} "
                             f"does not match dim={dim}")
    symplectic = run_symplectic(protocol, params)
    omega = protocol.omega_initial
    shift_stack = []
    for i, step in enumerate(protocol.steps):
        try:
            if isinstance(step, FrequencyJump):
                r_jump = 0.5 * math.log(omega / step.omega_new)
                op = fock.squeeze_operator_exact(r_jump, 0.0, dim)
                omega = step.omega_new
            elif isinstance(step, Wait):
                op = fock.free_evolution_operator(omega, step.tau, dim)
            elif isinstance(step, ShiftOrigin):
                c = step.d / _alpha_units(omega, params.mass, params.calibration)
                shift_stack.append(step.d)
                op = fock.displacement_operator_exact(c, dim)
            else:
                d = shift_stack.pop()
                c = d / _alpha_units(omega, params.mass, params.calibration)
                op = fock.displacement_operator_exact(-c, dim)
            rho = fock.apply_unitary(op, rho)
        except (TruncationError, ValueError) as exc:
            if isinstance(exc, TruncationError):
                raise TruncationError(
                    f"step {i} ({type(step).__name__}): {exc.base_message}",
                    min_dim=exc.min_dim) from exc
            raise
    return ProtocolResult(symplectic.pair, symplectic.displacement,
                          symplectic.elapsed, omega, final_rho=rho)


def implied_state(result, nbar0, dim=fock.DEFAULT_DIM):
    """Reconstruct the Fock density matrix implied by a symplectic summary
    acting on a thermal state.

    Valid for phase-rotation-invariant inputs (ground or thermal states):
    the residual rotation in the pair commutes through the input, so the
    state is D(alpha) S(r_eff, theta_eff) rho_th S^dag D^dag.
    """
    sp = squeeze_params_from_pair(result.pair)
    rho = fock.thermal_density_matrix(nbar0, dim)
    if sp.r > 0:
        s_op = fock.squeeze_operator_exact(sp.r, sp.theta, dim)
        rho = fock.apply_unitary(s_op, rho)
    if abs(result.displacement) > 0:
        d_op = fock.displacement_operator_exact(result.displacement, dim)
        rho = fock.apply_unitary(d_op, rho)
    return rho


BUILTIN_PROTOCOLS = ("S_minus_2r", "S_plus_2r", "multi_jump",
                     "displaced_squeeze", "amplify")


def builtin_protocol(name, params, n_jumps=None, alpha_i=None, r=None):
    """Construct one of the canonical protocols.

    S_minus_2r        jump down, quarter wait, jump back
    S_plus_2r         S_minus_2r plus a final quarter wait
    multi_jump        ``n_jumps`` alternating jumps with quarter waits
    displaced_squeeze S_plus_2r followed by a trap shift of amplitude
                      ``alpha_i``
    amplify           displaced_squeeze, quarter wait, then an
                      anti-squeezing double jump

    ``r`` overrides the per-jump amplitude (otherwise taken from the
    params' frequency pair); ``alpha_i`` sets the shift in displacement
    units.
    """
    omega1 = params.omega1
    if r is None:
        omega2 = params.omega2
    else:
        omega2 = omega1 * math.exp(-2.0 * r)
    quarter2 = 0.5 * math.pi / omega2
    quarter1 = 0.5 * math.pi / omega1
    double_jump = [FrequencyJump(omega2), Wait(quarter2), FrequencyJump(omega1)]

    if name == "S_minus_2r":
        steps = double_jump
    elif name == "S_plus_2r":
        steps = double_jump + [Wait(quarter1)]
    elif name == "multi_jump":
        if n_jumps is None or n_jumps < 1:
            raise ValueError("multi_jump requires n_jumps >= 1")
        steps = []
        for k in range(n_jumps):
            target = omega2 if k % 2 == 0 else omega1
            if k > 0:
                waited_at = omega2 if k % 2 == 1 else omega1
                steps.append(Wait(0.5 * math.pi / waited_at))
            steps.append(FrequencyJump(target))
    elif name in ("displaced_squeeze", "amplify"):
        if alpha_i is None:
            raise ValueError(f"{name} requires alpha_i")
        d = alpha_i * _alpha_units(omega1, params.mass, params.calibration)
        steps = double_jump + [Wait(quarter1), ShiftOrigin(d)]
        if name == "amplify":
            steps += [Wait(quarter1)] + double_jump
    else:
        raise ValueError(f"unknown builtin protocol {name!r}; "
                         f"known: {', '.join(BUILTIN_PROTOCOLS)}")
    return Protocol(omega1, tuple(steps))


def protocol_to_json(protocol):
    """Serialize to the plain-JSON protocol document."""
    steps = []
    for step in protocol.steps:
        if isinstance(step, FrequencyJump):
            steps.append({"type": "frequency_jump",
                          "omega_new_hz": step.omega_new / TWO_PI})
        elif isinstance(step, Wait):
            steps.append({"type": "wait", "tau_s": step.tau})
        elif isinstance(step, ShiftOrigin):
            steps.append({"type": "shift_origin", "d_m": step.d})
        else:
            steps.append({"type": "unshift_origin"})
    return {"schema_version": SCHEMA_VERSION,
            "omega_initial_hz": protocol.omega_initial / TWO_PI,
            "steps": steps}


def _require_keys(doc, required, optional=(), where="protocol"):
    unknown = set(doc) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    missing = set(required) - set(doc)
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")


def protocol_from_json(doc):
    """Parse the plain-JSON protocol document."""
    if not isinstance(doc, dict):
        raise ConfigError("protocol document must be a JSON object")
    _require_keys(doc, ("omega_initial_hz", "steps"), ("schema_version",))
    if doc.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        raise ConfigError(f"unsupported protocol schema_version "
                          f"{doc['schema_version']}")
    raw_steps = doc["steps"]
    if not isinstance(raw_steps, list):
        raise ConfigError("protocol steps must be a list")
    steps = []
    for i, entry in enumerate(raw_steps):
        where = f"steps[{i}]"
        if not isinstance(entry, dict) or "type" not in entry:
            raise ConfigError(f"{where}: each step needs a 'type' field")
        kind = entry["type"]
        try:
            if kind == "frequency_jump":
                _require_keys(entry, ("type", "omega_new_hz"), where=where)
                steps.append(FrequencyJump(TWO_PI * float(entry["omega_new_hz"])))
            elif kind == "wait":
                _require_keys(entry, ("type", "tau_s"), where=where)
                steps.append(Wait(float(entry["tau_s"])))
            elif kind == "shift_origin":
                _require_keys(entry, ("type", "d_m"), where=where)
                steps.append(ShiftOrigin(float(entry["d_m"])))
            elif kind == "unshift_origin":
                _require_keys(entry, ("type",), where=where)
                steps.append(UnshiftOrigin())
            else:
                raise ConfigError(f"{where}: unknown step type {kind!r}")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{where}: {exc}") from exc
    try:
        return Protocol(TWO_PI * float(doc["omega_initial_hz"]), tuple(steps))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid protocol: {exc}") from exc


def save_protocol(protocol, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(protocol_to_json(protocol), fh, indent=2)
        fh.write("\n")


def load_protocol(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed protocol JSON: {exc}") from exc
    return protocol_from_json(doc)
