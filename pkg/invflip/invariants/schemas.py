"""
Pydantic schemas for the JSON dump of extracted invariants, controllers and
bindings.
"""

from pydantic import BaseModel, Field

from ..st.emitter import emit_expr
from ..st.models import Program
from .models import (
    AtomicPredicate,
    ControllerBinding,
    PidConfig,
    SafetyInvariant,
    SkippedBlock,
)
from .services import (
    atomize,
    bind_controllers,
    extract_controllers,
    scan_invariants,
)


# OUTPUT SCHEMAS
class AtomOut(BaseModel):
    var: str = Field(description="State variable of the atom")
    op: str = Field(description="Inequality operator")
    threshold: float = Field(description="Threshold, in the variable's units")
    unit: str | None = Field(default=None, description="Unit carried from the pragma")
    var_kind: str = Field(description="physical, environmental or operator")

    @classmethod
    def from_atom(cls, atom: AtomicPredicate) -> "AtomOut":
        return cls(
            var=atom.var,
            op=str(atom.op),
            threshold=atom.threshold,
            unit=atom.unit,
            var_kind=str(atom.var_kind),
        )


class InvariantOut(BaseModel):
    predicate: str = Field(description="P(x) in canonical structured text")
    actuator: str = Field(description="Actuator driven by the invariant")
    then_value: int = Field(description="Actuator value while P(x) holds")
    else_value: int | None = Field(
        default=None, description="Actuator value otherwise (absent if one-armed)"
    )
    atoms: list[AtomOut] = Field(default_factory=list)

    @classmethod
    def from_invariant(
        cls, inv: SafetyInvariant, atoms: list[AtomicPredicate]
    ) -> "InvariantOut":
        return cls(
            predicate=emit_expr(inv.predicate),
            actuator=inv.actuator,
            then_value=inv.then_value,
            else_value=inv.else_value,
            atoms=[AtomOut.from_atom(atom) for atom in atoms],
        )


class ControllerOut(BaseModel):
    instance_id: str
    pv: str
    sp: float
    kp: float
    ki: float
    kd: float
    action: str
    out_min: float
    out_max: float
    out_target: str

    @classmethod
    def from_config(cls, cfg: PidConfig) -> "ControllerOut":
        return cls(
            instance_id=cfg.instance_id,
            pv=cfg.pv,
            sp=cfg.sp,
            kp=cfg.kp,
            ki=cfg.ki,
            kd=cfg.kd,
            action=str(cfg.action),
            out_min=cfg.out_min,
            out_max=cfg.out_max,
            out_target=cfg.out_target,
        )


class BindingOut(BaseModel):
    atom: AtomOut
    mechanism: str = Field(description="controller, direct_enforce or unreachable")
    controller: str | None = Field(default=None, description="Bound controller ID")
    reason: str | None = Field(default=None, description="Why the atom is unreachable")

    @classmethod
    def from_binding(cls, binding: ControllerBinding) -> "BindingOut":
        return cls(
            atom=AtomOut.from_atom(binding.atom),
            mechanism=str(binding.mechanism),
            controller=binding.controller.instance_id if binding.controller else None,
            reason=binding.reason,
        )


class SkippedOut(BaseModel):
    stmt_index: int
    line: int | None = None
    reason: str

    @classmethod
    def from_block(cls, block: SkippedBlock) -> "SkippedOut":
        return cls(
            stmt_index=block.stmt_index,
            line=block.source_span.line if block.source_span else None,
            reason=block.reason,
        )


class SpecDump(BaseModel):
    invariants: list[InvariantOut] = Field(default_factory=list)
    controllers: list[ControllerOut] = Field(default_factory=list)
    bindings: list[BindingOut] = Field(default_factory=list)
    skipped: list[SkippedOut] = Field(default_factory=list)

    @classmethod
    def from_programs(cls, safety: Program, control: Program | None) -> "SpecDump":
        """Extracts and binds everything an attacker learns from the two programs."""
        scan = scan_invariants(safety)
        controllers = extract_controllers(control) if control is not None else []
        invariants: list[InvariantOut] = []
        bindings: list[BindingOut] = []
        for inv in scan.invariants:
            atoms = atomize(inv.predicate, safety.symbols)
            invariants.append(InvariantOut.from_invariant(inv, atoms))
            bindings.extend(
                BindingOut.from_binding(b) for b in bind_controllers(atoms, controllers)
            )
        return cls(
            invariants=invariants,
            controllers=[ControllerOut.from_config(cfg) for cfg in controllers],
            bindings=bindings,
            skipped=[SkippedOut.from_block(block) for block in scan.skipped],
        )
