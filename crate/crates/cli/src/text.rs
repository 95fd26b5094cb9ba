//! Human-readable rendering of the report payloads. The JSON documents are
//! the stable interface; this module only aims to be pleasant to read.

use qcancel_core::report::{
    CenterPayload, DiscriminantPayload, EffectivenessPayload, MlPayload,
    ObstructionPayload, RingSummary, VerificationPayload, WitnessPayload,
};
use qcancel_core::verdict::Verdict;

fn header(ring: &RingSummary) -> String {
    let mut traits = vec![format!("Q(zeta_{})", ring.torsion_order)];
    if ring.free_params > 0 {
        traits.push(format!("{} free parameter(s)", ring.free_params));
    }
    if ring.weyl_factors > 0 {
        traits.push(format!("{} Weyl factor(s)", ring.weyl_factors));
    }
    if ring.commutative {
        traits.push("commutative".into());
    }
    format!(
        "ring {} over {} (GK dimension {})\n",
        ring.generators.join(", "),
        traits.join(", "),
        ring.gk_dimension
    )
}

pub fn center(ring: &RingSummary, p: &CenterPayload) -> String {
    let mut out = header(ring);
    out.push_str(&format!(
        "center      {}\n",
        if p.trivial { "trivial (scalars only)" } else { "nontrivial" }
    ));
    out.push_str(&format!("module rank {}\n", p.module_rank));
    if let Some(alpha) = &p.rectangular_exponents {
        out.push_str(&format!("exponents   {alpha:?}\n"));
    }
    if let Some(gens) = &p.central_generators {
        out.push_str(&format!("generated by {}\n", gens.join(", ")));
    }
    if let Some(w) = &p.nontrivial_witness {
        out.push_str(&format!("witness     {w}\n"));
    }
    out.push_str("lattice basis\n");
    if p.lattice_basis.is_empty() {
        out.push_str("  (zero lattice)\n");
    }
    for row in &p.lattice_basis {
        out.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    out
}

pub fn obstructions(ring: &RingSummary, p: &ObstructionPayload) -> String {
    let mut out = header(ring);
    for e in &p.sets {
        if e.empty {
            out.push_str(&format!("T[{}]  empty\n", e.generator));
        } else {
            out.push_str(&format!(
                "T[{}]  witness {:?} -> {}\n",
                e.generator,
                e.witness.as_ref().expect("nonempty set has a witness"),
                e.witness_monomial.as_deref().unwrap_or("1"),
            ));
        }
    }
    out.push_str(&format!("rigid  {}\n", if p.rigid { "yes" } else { "no" }));
    out
}

pub fn ml(ring: &RingSummary, p: &MlPayload) -> String {
    let mut out = header(ring);
    if !p.supported {
        out.push_str(&format!(
            "invariant not computed: {}\n",
            p.note.as_deref().unwrap_or("unsupported input")
        ));
        return out;
    }
    let gens = p.subalgebra_generators.as_ref().expect("supported");
    if gens.is_empty() {
        out.push_str("invariant subalgebra: the ground field (every generator moves)\n");
    } else {
        out.push_str(&format!(
            "invariant subalgebra generated by {}\n",
            gens.join(", ")
        ));
    }
    out.push_str(&format!(
        "rigid  {}\n",
        if p.rigid == Some(true) { "yes" } else { "no" }
    ));
    out
}

pub fn discriminant(ring: &RingSummary, p: &DiscriminantPayload) -> String {
    let mut out = header(ring);
    out.push_str(&format!("module rank {}\n", p.module_rank));
    out.push_str(&format!("normalized  {}\n", p.normalized));
    out.push_str(&format!("unit        {}\n", p.unit));
    out
}

pub fn effectiveness(ring: &RingSummary, p: &EffectivenessPayload) -> String {
    let mut out = header(ring);
    out.push_str(&format!("effective   {}\n", p.effective));
    out.push_str(&format!("dominating  {}\n", p.dominating));
    out.push_str(&format!("rule        {}\n", p.rule));
    out.push_str(&format!("normalized  {}\n", p.normalized_discriminant));
    out
}

pub fn witness(ring: &RingSummary, p: &WitnessPayload) -> String {
    let mut out = header(ring);
    if p.found {
        out.push_str(&format!(
            "generator {} moves; witness exponents {:?}\n",
            p.generator,
            p.witness.as_ref().expect("found"),
        ));
        out.push_str(&format!(
            "D_1({}) = {}\n",
            p.generator,
            p.first_image.as_deref().expect("found"),
        ));
    } else {
        out.push_str(&format!(
            "generator {} cannot be moved: {}\n",
            p.generator,
            p.note.as_deref().unwrap_or("the obstruction set is empty"),
        ));
    }
    out
}

pub fn verification(ring: &RingSummary, p: &VerificationPayload) -> String {
    let mut out = header(ring);
    out.push_str(&format!(
        "generator {}, witness {:?}, degree bound {}, index bound {}\n",
        p.generator, p.witness, p.degree_bound, p.index_bound
    ));
    for c in &p.checks {
        out.push_str(&format!(
            "{}  {:<24} {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    out.push_str(&format!(
        "overall: {}\n",
        if p.passed { "PASS" } else { "FAIL" }
    ));
    out
}

pub fn verdict(ring: &RingSummary, v: &Verdict) -> String {
    let mut out = header(ring);
    out.push_str(&format!("verdict  {}\n", v.conclusion.as_str()));
    if !v.citations.is_empty() {
        out.push_str("evidence\n");
        for c in &v.citations {
            out.push_str(&format!("  - {}: {}\n", c.rule, c.statement));
        }
    }
    if !v.notes.is_empty() {
        out.push_str("notes\n");
        for n in &v.notes {
            out.push_str(&format!("  - {n}\n"));
        }
    }
    let f = &v.findings;
    out.push_str("findings\n");
    out.push_str(&format!("  center trivial      {}\n", f.center_is_trivial));
    if let Some(r) = &f.module_rank {
        out.push_str(&format!("  module rank         {r}\n"));
    }
    if let Some(a) = &f.rectangular_exponents {
        out.push_str(&format!("  rectangular         {a:?}\n"));
    }
    if let Some(g) = &f.coordinate_gcds {
        out.push_str(&format!("  coordinate gcds     [{}]\n", g.join(", ")));
    }
    if let Some(e) = &f.obstruction_sets_empty {
        out.push_str(&format!("  obstructions empty  {e:?}\n"));
    }
    if let Some(r) = f.rigid {
        out.push_str(&format!("  rigid               {r}\n"));
    }
    if let Some(e) = f.discriminant_effective {
        out.push_str(&format!("  discriminant        effective: {e}"));
        if let Some(d) = f.discriminant_dominating {
            out.push_str(&format!(", dominating: {d}"));
        }
        if let Some(rule) = f.discriminant_rule {
            out.push_str(&format!(" ({rule})"));
        }
        out.push('\n');
    }
    out
}
