use super::evaluate::Context;

/// Every identity in the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    DkappaLeafdiv,
    Rummler,
    Main113,
    CoclosedV,
    CoclosedMixed,
    CoclosedHh,
    Codim1Coclosed,
    TildeDelta,
    DeltaKappaRemark,
    DivSplit,
    Integral136,
    FlowRicci,
    OneillI,
    OneillII,
    OneillIII,
    OneillIV,
    OneillV,
    Lemma22A,
    Lemma22B,
    Lemma22C,
    Killing21,
    Prop24A,
    Prop24B,
    Prop24C,
    DivH24,
    Cor26Verdict,
    Einstein2526,
    ContactClass,
}

/// Hypotheses an identity needs before it is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Needs {
    pub bundle_like: bool,
    pub umbilical: bool,
    pub constant_curvature: bool,
    pub kappa_basic: bool,
    pub a_zero: bool,
    pub div_h_tau_zero: bool,
    /// Every chart coordinate periodic.
    pub periodic: bool,
    pub dim: Option<usize>,
    pub leaf_dim: Option<usize>,
    pub min_leaf_dim: usize,
    pub codim: Option<usize>,
    pub min_codim: usize,
    /// Minimum number of validated basic coordinate fields.
    pub basic_fields: usize,
}

const ANY: Needs = Needs {
    bundle_like: false,
    umbilical: false,
    constant_curvature: false,
    kappa_basic: false,
    a_zero: false,
    div_h_tau_zero: false,
    periodic: false,
    dim: None,
    leaf_dim: None,
    min_leaf_dim: 1,
    codim: None,
    min_codim: 1,
    basic_fields: 0,
};

const BL: Needs = Needs { bundle_like: true, ..ANY };
const BL_UMB: Needs = Needs { bundle_like: true, umbilical: true, ..ANY };
const DOMINGUEZ: Needs = Needs { bundle_like: true, kappa_basic: true, ..ANY };

impl Needs {
    /// `None` when every hypothesis holds, otherwise the first one that fails.
    pub fn check(&self, ctx: &Context) -> Option<String> {
        self.check_properties(ctx).or_else(|| self.check_structure(ctx))
    }

    /// The geometric hypotheses (bundle-like, umbilical, basic κ, vanishing A or div_H τ).
    pub fn check_properties(&self, ctx: &Context) -> Option<String> {
        let prof = &ctx.profile;
        let flags = [
            (self.bundle_like, prof.bundle_like == Some(true), "metric is not bundle-like"),
            (self.umbilical, prof.umbilical, "leaves are not totally umbilical"),
            (self.kappa_basic, prof.kappa_basic, "κ is not basic"),
            (self.a_zero, prof.a_zero, "A does not vanish"),
            (self.div_h_tau_zero, prof.div_h_tau_zero, "div_H τ does not vanish"),
        ];
        flags.into_iter().find(|&(needed, holds, _)| needed && !holds).map(|(_, _, why)| why.to_string())
    }

    /// Dimensions, constant curvature, periodicity and basic fields: what the residual needs to be computable at all.
    pub fn check_structure(&self, ctx: &Context) -> Option<String> {
        let m = &ctx.model;
        let (n, p, q) = (m.dim(), m.leaf_dim(), m.codim());
        if self.constant_curvature && ctx.profile.curvature.is_none() {
            return Some("no validated constant curvature".into());
        }
        if self.periodic && !m.periodic().iter().all(|&b| b) {
            return Some("chart is not fully periodic".into());
        }
        if self.dim.is_some_and(|d| d != n) {
            return Some(format!("needs n = {}, model has n = {n}", self.dim.unwrap()));
        }
        if self.leaf_dim.is_some_and(|d| d != p) || p < self.min_leaf_dim {
            return Some(format!("leaf dimension p = {p} out of range"));
        }
        if self.codim.is_some_and(|d| d != q) || q < self.min_codim {
            return Some(format!("codimension q = {q} out of range"));
        }
        if ctx.basic.len() < self.basic_fields {
            return Some(format!("needs {} basic fields, found {}", self.basic_fields, ctx.basic.len()));
        }
        None
    }
}

/// A catalog entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Identity {
    pub id: &'static str,
    pub kind: Kind,
    pub anchor: &'static str,
    pub needs: Needs,
}

pub static CATALOG: [Identity; 28] = [
    Identity {
        id: "DKAPPA_LEAFDIV",
        kind: Kind::DkappaLeafdiv,
        anchor: "(1.7) dκ(X,Y) = −div_F 𝒱[X,Y]",
        needs: Needs { min_codim: 2, basic_fields: 2, ..ANY },
    },
    Identity {
        id: "RUMMLER",
        kind: Kind::Rummler,
        anchor: "(1.8) dχ_F(V_1,…,V_p,X) = (−1)^{p+1} κ(X) χ_F(V_1,…,V_p)",
        needs: ANY,
    },
    Identity {
        id: "MAIN_113",
        kind: Kind::Main113,
        anchor: "(1.13) d(κ∧χ_F)(V_1,…,V_p,X,Y) = dκ(X,Y)",
        needs: Needs { min_codim: 2, basic_fields: 2, ..ANY },
    },
    Identity {
        id: "COCLOSED_V",
        kind: Kind::CoclosedV,
        anchor: "(1.16) δ(κ∧χ_F)(V_1,…,V_p) = −div_H τ",
        needs: Needs { codim: Some(2), ..DOMINGUEZ },
    },
    Identity {
        id: "COCLOSED_MIXED",
        kind: Kind::CoclosedMixed,
        anchor: "(1.21) δ(κ∧χ_F)(X,V_1,…,V̂_j,…,V_p) = 0",
        needs: Needs { codim: Some(2), basic_fields: 1, ..DOMINGUEZ },
    },
    Identity {
        id: "COCLOSED_HH",
        kind: Kind::CoclosedHh,
        anchor: "(1.26) δ(κ∧χ_F)(X_1,X_2,V_1,…,V_{p−2}) = 0",
        needs: Needs { codim: Some(2), min_leaf_dim: 2, basic_fields: 2, ..DOMINGUEZ },
    },
    Identity {
        id: "CODIM1_COCLOSED",
        kind: Kind::Codim1Coclosed,
        anchor: "(1.28) δ(κ∧χ_F)(V_1,…,V_{n−1}) = −Xκ(X) = −div_H τ",
        needs: Needs { codim: Some(1), ..DOMINGUEZ },
    },
    Identity { id: "TILDE_DELTA", kind: Kind::TildeDelta, anchor: "(1.33) δ̃κ = −div_H τ", needs: DOMINGUEZ },
    Identity {
        id: "DELTA_KAPPA_REMARK",
        kind: Kind::DeltaKappaRemark,
        anchor: "(Thm 1.9, remark) δκ = κ(τ) − div_H τ",
        needs: ANY,
    },
    Identity { id: "DIV_SPLIT", kind: Kind::DivSplit, anchor: "(1.35) div_M τ + g(τ,τ) = div_H τ", needs: ANY },
    Identity {
        id: "INTEGRAL_136",
        kind: Kind::Integral136,
        anchor: "(1.36) ∫_M g(τ,τ) dV = ∫_M div_H τ dV",
        needs: Needs { periodic: true, ..ANY },
    },
    Identity {
        id: "FLOW_RICCI",
        kind: Kind::FlowRicci,
        anchor: "(Cor 1.5) Ric(V,V) = div_M τ + Σ_a g(A_{X_a}V, A_{X_a}V)",
        needs: Needs { leaf_dim: Some(1), ..BL },
    },
    Identity {
        id: "ONEILL_I",
        kind: Kind::OneillI,
        anchor: "(Prop 2.1 i) R(U,V,W,W′) = R̂(U,V,W,W′) − g(T_UW,T_VW′) + g(T_VW,T_UW′)",
        needs: BL,
    },
    Identity {
        id: "ONEILL_II",
        kind: Kind::OneillII,
        anchor: "(Prop 2.1 ii) R(U,V,W,X) = g((D_VT)_UW,X) − g((D_UT)_VW,X)",
        needs: BL,
    },
    Identity {
        id: "ONEILL_III",
        kind: Kind::OneillIII,
        anchor: "(Prop 2.1 iii) R(X,U,Y,V) = g((D_XT)_UV,Y) − g(T_UX,T_VY) + g((D_UA)_XY,V) + g(A_XU,A_YV)",
        needs: BL,
    },
    Identity {
        id: "ONEILL_IV",
        kind: Kind::OneillIV,
        anchor: "(Prop 2.1 iv) R(X,Y,Z,U) = g((D_ZA)_XY,U) + g(A_XY,T_UZ) − g(A_YZ,T_UX) − g(A_ZX,T_UY)",
        needs: BL,
    },
    Identity {
        id: "ONEILL_V",
        kind: Kind::OneillV,
        anchor: "(Prop 2.1 v) R(X,Y,Z,Z′) = R*(X,Y,Z,Z′) − 2g(A_XY,A_ZZ′) + g(A_YZ,A_XZ′) − g(A_XZ,A_YZ′)",
        needs: BL,
    },
    Identity {
        id: "LEMMA22_A",
        kind: Kind::Lemma22A,
        anchor: "(Lemma 2.2 a) R(U,V,U,V) = R̂(U,V,U,V) + [g(U,V)² − g(U,U)g(V,V)] g(τ/p,τ/p)",
        needs: BL_UMB,
    },
    Identity {
        id: "LEMMA22_B",
        kind: Kind::Lemma22B,
        anchor: "(Lemma 2.2 b) R(X,U,X,U) = g(U,U)[g(D_X τ/p, X) − g(X,τ/p)²] + g(A_XU,A_XU)",
        needs: BL_UMB,
    },
    Identity {
        id: "LEMMA22_C",
        kind: Kind::Lemma22C,
        anchor: "(Lemma 2.2 c) R(X,Y,X,Y) = R*(X,Y,X,Y) − 3g(A_XY,A_XY)",
        needs: BL,
    },
    Identity {
        id: "KILLING_21",
        kind: Kind::Killing21,
        anchor: "(2.1) g(D_U(A_XY),V) + g(D_V(A_XY),U) = g(U,V) dκ(X,Y)",
        needs: Needs { basic_fields: 1, ..BL_UMB },
    },
    Identity {
        id: "PROP24_A",
        kind: Kind::Prop24A,
        anchor: "(Prop 2.4 a) ℋD_V τ = 0",
        needs: Needs { min_leaf_dim: 2, ..BL_UMB },
    },
    Identity {
        id: "PROP24_B",
        kind: Kind::Prop24B,
        anchor: "(Prop 2.4 b) τ basic, hence κ basic",
        needs: Needs { min_leaf_dim: 2, ..BL_UMB },
    },
    Identity {
        id: "PROP24_C",
        kind: Kind::Prop24C,
        anchor: "(Prop 2.4 c) A_τ = 0",
        needs: Needs { min_leaf_dim: 2, ..BL_UMB },
    },
    Identity {
        id: "DIVH_24",
        kind: Kind::DivH24,
        anchor: "(2.4) div_H τ = cpq + (1/p)g(τ,τ) − (p/g(U,U)) Σ_a g(A_{X_a}U,A_{X_a}U)",
        needs: Needs { constant_curvature: true, ..BL_UMB },
    },
    Identity {
        id: "COR26_VERDICT",
        kind: Kind::Cor26Verdict,
        anchor: "(Cor 2.6 ii vs 2.4) g(τ,τ) = −pqc as printed; −p²qc from (2.4) with A = 0, div_H τ = 0",
        needs: Needs { constant_curvature: true, a_zero: true, div_h_tau_zero: true, ..BL_UMB },
    },
    Identity {
        id: "EINSTEIN_25_26",
        kind: Kind::Einstein2526,
        anchor: "(2.5)–(2.6) Σ_a R*(Y,X_a,Y,X_a) = (q−1)c g(Y,Y) + 3Σ_a g(A_YX_a,A_YX_a); (λ − (q−1)c) g(τ,τ) = 0",
        needs: Needs { constant_curvature: true, ..BL },
    },
    Identity {
        id: "CONTACT_CLASS",
        kind: Kind::ContactClass,
        anchor: "(Thm 1.3) (α∧dα)(V,X_1,X_2) = −g(V,[X_1,X_2]), α = g(V,·)",
        needs: Needs { dim: Some(3), leaf_dim: Some(1), ..ANY },
    },
];

pub fn catalog() -> &'static [Identity] {
    &CATALOG
}

/// Looks up an identity by id, case-insensitively.
pub fn find(id: &str) -> Option<&'static Identity> {
    CATALOG.iter().find(|i| i.id.eq_ignore_ascii_case(id.trim()))
}
