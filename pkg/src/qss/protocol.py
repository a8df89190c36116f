"""Reconstruction phase: a qualified subset of t players recovers the secret.

Flow per pass (run twice, once for the secret and once for its hash):

1. every player turns their share into a shadow (share times Lagrange weight);
2. the reconstructor P1 prepares |s1>_H |0>_T, applies the QFT to H and
   copies H onto T;
3. T hops through P2..Pt, each applying the diagonal shadow oracle;
4. T returns to P1, who uncopies, measures T (any nonzero outcome aborts the
   pass), applies the inverse QFT to H and measures H.

The secret pass yields f(0)' and the hash pass g(0)'; the run is accepted
iff both ancilla outcomes were 0 and SHA1(f(0)') mod d equals g(0)'.

The channel is an in-process token ring: per-hop adversary hooks stand in
for whatever sits on the (otherwise assumed authenticated) quantum link.
Hooks may only act on the transmitted register and the optional adversary
ancilla; H never leaves P1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field, replace
from typing import Callable, Literal, Mapping

import numpy as np

from .dealer import DealerConfig, SharePacket, deal, hash_to_field
from .errors import InconsistentPackets
from .field import FieldElement, PrimeModulus, shadow
from .qudit import (
    RegisterLayout,
    QuditState,
    apply_copy,
    apply_iqft,
    apply_qft,
    apply_shadow_phase,
    basis_state,
    measure,
)

HOME = "H"
TRANSMITTED = "T"

PassName = Literal["secret", "hash"]

VERDICT_ACCEPTED = "accepted"
VERDICT_ABORT_ANCILLA = "abort_ancilla"
VERDICT_ABORT_HASH = "abort_hash"


@dataclass(frozen=True)
class Player:
    id: int
    packet: SharePacket
    role: Literal["reconstructor", "participant"]


@dataclass(frozen=True)
class HookContext:
    """What an adversary hook gets to know: which pass, which hop, and a
    callback that files an observation into the transcript."""

    pass_name: str
    hop_index: int | None
    stage: Literal["hop", "post_uncopy"]
    record: Callable[[dict], None]


Hook = Callable[[QuditState, np.random.Generator, HookContext], QuditState]


@dataclass(frozen=True)
class Channel:
    """Ordered ring P1 -> P2 -> ... -> Pt -> P1 with optional adversary hooks.

    hooks maps a 0-based hop index (hop j carries T from position j+1 to
    position j+2, the last hop returning to P1) to a Hook. post_uncopy fires
    after P1's uncopy, just before the ancilla measurement. ancilla_register,
    when set, adds a third register of the same dimension for the adversary.
    """

    hops: tuple[tuple[int, int], ...]
    hooks: Mapping[int, Hook] = dataclass_field(default_factory=dict)
    post_uncopy: Hook | None = None
    ancilla_register: str | None = None

    @classmethod
    def ring(cls, t: int, **kwargs) -> "Channel":
        if t < 1:
            raise ValueError("need at least one player")
        if t == 1:
            return cls(hops=(), **kwargs)
        hops = tuple((j, j % t + 1) for j in range(1, t + 1))
        return cls(hops=hops, **kwargs)


@dataclass(frozen=True)
class ProtocolTranscript:
    """Record of one full run: shadows, hop events, outcomes, verdict."""

    d: int
    t: int
    xs: tuple[int, ...]
    shadows_secret: tuple[int, ...]
    shadows_hash: tuple[int, ...]
    ancilla: tuple[int, ...]
    f0: int | None
    g0: int | None
    verdict: str
    seed: int | None
    hook_events: tuple[tuple[str, int | None, dict], ...] = ()

    @property
    def accepted(self) -> bool:
        return self.verdict == VERDICT_ACCEPTED

    def to_json(self, shots: int = 1) -> dict:
        return {
            "d": self.d,
            "t": self.t,
            "xs": list(self.xs),
            "verdict": self.verdict,
            "f0": self.f0,
            "g0": self.g0,
            "ancilla": list(self.ancilla),
            "shots": shots,
            "seed": self.seed,
        }

    def to_json_str(self, shots: int = 1) -> str:
        return json.dumps(self.to_json(shots), sort_keys=True)


@dataclass(frozen=True)
class ProtocolInstance:
    """Everything a run needs, resolved down to shadow values.

    Packet-backed instances come from a deal; shadow-specified ones let the
    attack harness exercise the quantum pipeline directly (e.g. d=2 admits
    only a single share point, so multi-player d=2 rings exist only at the
    shadow level).
    """

    modulus: PrimeModulus
    xs: tuple[int, ...]
    shadows_secret: tuple[int, ...]
    shadows_hash: tuple[int, ...]
    players: tuple[Player, ...] | None = None
    secret: int | None = None

    @property
    def t(self) -> int:
        return len(self.shadows_secret)

    def with_shadow(self, position: int, value: int, pass_name: PassName = "secret") -> "ProtocolInstance":
        """Copy of this instance with one player's shadow forced (1-based position)."""
        key = "shadows_secret" if pass_name == "secret" else "shadows_hash"
        values = list(getattr(self, key))
        values[position - 1] = value % self.modulus.d
        return replace(self, **{key: tuple(values)})

    def expected_value(self, pass_name: PassName = "secret") -> int:
        values = self.shadows_secret if pass_name == "secret" else self.shadows_hash
        return sum(values) % self.modulus.d

    def run(
        self,
        channel: Channel | None = None,
        seed: int | None = None,
        rng: np.random.Generator | None = None,
    ) -> ProtocolTranscript:
        if channel is None:
            channel = Channel.ring(self.t)
        if rng is None:
            rng = np.random.default_rng(seed)
        return _execute(self, channel, rng, seed)


def make_players(packets: list[SharePacket]) -> list[Player]:
    """Wrap a qualified subset, first packet becoming the reconstructor P1."""
    return [
        Player(id=p.player_id, packet=p, role="reconstructor" if i == 0 else "participant")
        for i, p in enumerate(packets)
    ]


def instance_from_players(players: list[Player], secret: int | None = None) -> ProtocolInstance:
    if not players:
        raise ValueError("player list must not be empty")
    if sum(1 for p in players if p.role == "reconstructor") != 1 or players[0].role != "reconstructor":
        raise InconsistentPackets("exactly the first player must be the reconstructor")
    moduli = {p.packet.x.modulus for p in players}
    if len(moduli) != 1:
        raise InconsistentPackets(f"packets mix moduli: {sorted(m.d for m in moduli)}")
    xs = [p.packet.x for p in players]
    if len({x.value for x in xs}) != len(xs):
        raise InconsistentPackets("packets repeat evaluation points")
    modulus = moduli.pop()
    return ProtocolInstance(
        modulus=modulus,
        xs=tuple(x.value for x in xs),
        shadows_secret=tuple(shadow(p.packet.f_share, p.packet.x, xs).value for p in players),
        shadows_hash=tuple(shadow(p.packet.g_share, p.packet.x, xs).value for p in players),
        players=tuple(players),
        secret=secret,
    )


def instance_from_deal(
    config: DealerConfig, subset: tuple[int, ...] | None = None
) -> ProtocolInstance:
    """Deal per config and assemble the qualified subset (default P1..Pt)."""
    _, packets = deal(config)
    ids = subset if subset is not None else tuple(range(1, config.t + 1))
    if len(ids) != config.t:
        raise InconsistentPackets(f"qualified subset must have t={config.t} members")
    by_id = {p.player_id: p for p in packets}
    players = make_players([by_id[i] for i in ids])
    return instance_from_players(players, secret=config.secret)


def instance_from_shadows(
    d: int,
    shadows_secret: tuple[int, ...],
    shadows_hash: tuple[int, ...] | None = None,
    secret: int | None = None,
) -> ProtocolInstance:
    """Shadow-level instance for harness runs that bypass the dealing phase."""
    modulus = PrimeModulus(d)
    if shadows_hash is None:
        shadows_hash = tuple(0 for _ in shadows_secret)
    if len(shadows_hash) != len(shadows_secret):
        raise InconsistentPackets("shadow lists must have equal length")
    return ProtocolInstance(
        modulus=modulus,
        xs=tuple(range(1, len(shadows_secret) + 1)),
        shadows_secret=tuple(v % d for v in shadows_secret),
        shadows_hash=tuple(v % d for v in shadows_hash),
        secret=secret,
    )


def run_reconstruction(
    players: list[Player],
    channel: Channel | None = None,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> ProtocolTranscript:
    """Execute both passes for a qualified subset and return the transcript."""
    return instance_from_players(players).run(channel=channel, seed=seed, rng=rng)


def verify_hash(f0: FieldElement, g0: FieldElement, d: PrimeModulus) -> bool:
    """Final check of a run: SHA1 of the recovered secret, mod d, against g(0)'."""
    return hash_to_field(f0.value, d).value == g0.value


def expected_sum(players: list[Player], pass_name: PassName = "secret") -> FieldElement:
    """Classical oracle: sum of shadows mod d, no quantum simulation."""
    if not players:
        raise ValueError("player list must not be empty")
    xs = [p.packet.x for p in players]
    modulus = xs[0].modulus
    total = FieldElement(0, modulus)
    for p in players:
        share = p.packet.f_share if pass_name == "secret" else p.packet.g_share
        total = total + shadow(share, p.packet.x, xs)
    return total


def _execute(
    instance: ProtocolInstance,
    channel: Channel,
    rng: np.random.Generator,
    seed: int | None,
) -> ProtocolTranscript:
    t = instance.t
    expected_hops = 0 if t == 1 else t
    if len(channel.hops) != expected_hops:
        raise ValueError(
            f"channel has {len(channel.hops)} hops, expected {expected_hops} for t={t}"
        )
    registers = (HOME, TRANSMITTED)
    if channel.ancilla_register is not None:
        registers = registers + (channel.ancilla_register,)
    layout = RegisterLayout(d=instance.modulus.d, registers=registers)

    events: list[tuple[str, int | None, dict]] = []
    ancilla: list[int] = []
    f0: int | None = None
    g0: int | None = None
    verdict = VERDICT_ACCEPTED

    for pass_name, shadows in (
        ("secret", instance.shadows_secret),
        ("hash", instance.shadows_hash),
    ):
        anc, value = _run_pass(layout, instance.modulus, shadows, channel, rng, pass_name, events)
        ancilla.append(anc)
        if anc != 0:
            verdict = VERDICT_ABORT_ANCILLA
            break
        if pass_name == "secret":
            f0 = value
        else:
            g0 = value

    if verdict == VERDICT_ACCEPTED:
        ok = verify_hash(
            instance.modulus.element(f0), instance.modulus.element(g0), instance.modulus
        )
        verdict = VERDICT_ACCEPTED if ok else VERDICT_ABORT_HASH

    return ProtocolTranscript(
        d=instance.modulus.d,
        t=t,
        xs=instance.xs,
        shadows_secret=instance.shadows_secret,
        shadows_hash=instance.shadows_hash,
        ancilla=tuple(ancilla),
        f0=f0,
        g0=g0,
        verdict=verdict,
        seed=seed,
        hook_events=tuple(events),
    )


def _run_pass(
    layout: RegisterLayout,
    modulus: PrimeModulus,
    shadows: tuple[int, ...],
    channel: Channel,
    rng: np.random.Generator,
    pass_name: str,
    events: list,
) -> tuple[int, int | None]:
    t = len(shadows)
    values = {HOME: shadows[0], TRANSMITTED: 0}
    if channel.ancilla_register is not None:
        values[channel.ancilla_register] = 0
    state = basis_state(layout, values)
    state = apply_qft(state, HOME)
    state = apply_copy(state, HOME, TRANSMITTED)

    for hop_index in range(len(channel.hops)):
        hook = channel.hooks.get(hop_index)
        if hook is not None:
            ctx = _context(pass_name, hop_index, "hop", events)
            state = hook(state, rng, ctx)
        if hop_index < t - 1:
            s = FieldElement(shadows[hop_index + 1], modulus)
            state = apply_shadow_phase(state, TRANSMITTED, s)

    state = apply_copy(state, HOME, TRANSMITTED)
    if channel.post_uncopy is not None:
        ctx = _context(pass_name, None, "post_uncopy", events)
        state = channel.post_uncopy(state, rng, ctx)

    check = measure(state, TRANSMITTED, rng)
    if check.value != 0:
        return check.value, None
    state = apply_iqft(check.post_state, HOME)
    outcome = measure(state, HOME, rng)
    return 0, outcome.value


def _context(pass_name: str, hop_index: int | None, stage: str, events: list) -> HookContext:
    def record(payload: dict) -> None:
        events.append((pass_name, hop_index, dict(payload)))

    return HookContext(pass_name=pass_name, hop_index=hop_index, stage=stage, record=record)
