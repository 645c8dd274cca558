//! Reference instances with known answers, shared by tests and the CLI.

use num_traits::{One, Zero};
use qdecide_core::channels::{choi_of_kraus, projector};
use qdecide_core::{Complex, Matrix, QMatrix, Rational};

use crate::encoders::{deterministic_vertex, encode, Distribution, ProblemInstance};
use crate::error::Result;
use crate::formula::Formula;
use crate::witness::Assignment;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Real rational matrix as a complex one.
pub fn real_matrix(rows: Vec<Vec<Rational>>) -> QMatrix {
    QMatrix::from_rational(&Matrix::from_rows(rows))
}

pub fn scaled_identity(n: usize, c: Rational) -> QMatrix {
    QMatrix::identity(n).map(|z| z.scale(&c))
}

/// `|Φ⁺⟩⟨Φ⁺|` on two qubits.
pub fn phi_plus() -> QMatrix {
    let h = rat(1, 2);
    let z = Rational::zero();
    real_matrix(vec![
        vec![h.clone(), z.clone(), z.clone(), h.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone()],
        vec![h.clone(), z.clone(), z.clone(), h],
    ])
}

pub fn identity_choi(d: usize) -> QMatrix {
    choi_of_kraus(&[QMatrix::identity(d)], d)
}

/// `X ↦ tr[X] 𝟙/d`, Choi matrix `𝟙/d²`.
pub fn depolarizing_choi(d: usize) -> QMatrix {
    scaled_identity(d * d, rat(1, (d * d) as i64))
}

pub fn unitary_choi(v: &QMatrix) -> QMatrix {
    choi_of_kraus(std::slice::from_ref(v), v.rows())
}

/// Mixed-unitary channel `Σ_k p_k V_k · V_k†`.
pub fn mixed_unitary_choi(weights: &[Rational], unitaries: &[QMatrix]) -> QMatrix {
    let d = unitaries[0].rows();
    weights
        .iter()
        .zip(unitaries)
        .fold(QMatrix::zeros(d * d, d * d), |acc, (p, v)| acc + unitary_choi(v).map(|z| z.scale(p)))
}

/// `(𝟙 − iH)(𝟙 + iH)⁻¹` for Hermitian `H`: a unitary with rational entries.
pub fn cayley_unitary(h: &QMatrix) -> QMatrix {
    let n = h.rows();
    let ih = h.map(|z| z.clone() * Complex::i());
    let plus = QMatrix::identity(n) + ih.clone();
    let minus = QMatrix::identity(n) - ih;
    minus.matmul(&plus.inverse().expect("𝟙 + iH is invertible for Hermitian H"))
}

/// PR box: `P(i,j|k,l) = 1/2` iff `i ⊕ j = k·l`.
pub fn pr_box() -> Distribution {
    Matrix::from_fn(4, 4, |r, c| {
        let (k, l) = (r / 2, r % 2);
        let (i, j) = (c / 2, c % 2);
        if (i ^ j) == (k & l) {
            rat(1, 2)
        } else {
            Rational::zero()
        }
    })
}

/// CHSH value `Σ_{k,l} (−1)^{kl} E(k,l)`, with correlator
/// `E = P(i = j) − P(i ≠ j)`; at most 2 for local models.
pub fn chsh(p: &Distribution) -> Rational {
    let mut s = Rational::zero();
    for k in 0..2 {
        for l in 0..2 {
            let r = k * 2 + l;
            let e = &p[(r, 0)] + &p[(r, 3)] - &p[(r, 1)] - &p[(r, 2)];
            s = if k * l == 1 { s - e } else { s + e };
        }
    }
    s
}

/// An instance, its formula, and an exact witness the formula must accept.
pub struct WitnessFixture {
    pub name: &'static str,
    pub instance: ProblemInstance,
    pub formula: Formula,
    pub witness: Assignment,
}

fn fixture(
    name: &'static str,
    instance: ProblemInstance,
    fill: impl FnOnce(&Formula, &mut Assignment) -> Result<()>,
) -> Result<WitnessFixture> {
    let formula = encode(&instance)?;
    let mut witness = Assignment::new();
    fill(&formula, &mut witness)?;
    Ok(WitnessFixture { name, instance, formula, witness })
}

fn set(f: &Formula, a: &mut Assignment, var: &str, m: &QMatrix) -> Result<()> {
    let v = f.binder(var).expect("declared variable").clone();
    a.set_matrix(f, &v, m)?;
    Ok(())
}

fn point_mass(len: usize, at: usize) -> QMatrix {
    QMatrix::from_rational(&Matrix::from_fn(1, len, |_, j| if j == at { Rational::one() } else { Rational::zero() }))
}

fn unit_vec(n: usize, k: usize, sign: i64) -> Vec<Complex<Rational>> {
    (0..n).map(|i| if i == k { Complex::real(int(sign)) } else { Complex::zero() }).collect()
}

/// Every satisfiable encoder fixture with its exact witness.
pub fn witness_fixtures() -> Result<Vec<WitnessFixture>> {
    let half = scaled_identity(2, rat(1, 2));
    let mut out = Vec::new();

    out.push(fixture(
        "separability: maximally mixed two-qubit product",
        ProblemInstance::Separability { rho: half.kron(&half), d: 2, n: 2, terms: None },
        |f, a| {
            set(f, a, "lambda", &point_mass(16, 0))?;
            for i in 0..16 {
                for k in 0..2 {
                    set(f, a, &format!("rho_{i}_{k}"), &half)?;
                }
            }
            Ok(())
        },
    )?);

    out.push(fixture(
        "distillability: Bell state, one copy",
        ProblemInstance::Distillability { rho: phi_plus(), d: 2, n: 1 },
        |f, a| {
            // Y = e0 e1ᵀ − e1 e0ᵀ, the antisymmetric vector |01⟩ − |10⟩
            let y = f.binder("Y").expect("declared").clone();
            a.set_factors(f, &y, &[(unit_vec(2, 0, 1), unit_vec(2, 1, 1)), (unit_vec(2, 1, -1), unit_vec(2, 0, 1))])?;
            Ok(())
        },
    )?);

    out.push(fixture(
        "lhv distribution: single setting, single outcome",
        ProblemInstance::LhvDistribution { p: Matrix::from_rows(vec![vec![int(1)]]), n: 1, m: 1 },
        |f, a| set(f, a, "Lambda", &real_matrix(vec![vec![int(1)]])),
    )?);

    let (fa, fb) = (2, 1);
    out.push(fixture(
        "lhv distribution: deterministic local responses",
        ProblemInstance::LhvDistribution { p: deterministic_vertex(2, 2, fa, fb), n: 2, m: 2 },
        move |f, a| {
            let lambda = QMatrix::from_rational(&Matrix::from_fn(4, 4, |r, c| {
                if (r, c) == (fa, fb) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            set(f, a, "Lambda", &lambda)
        },
    )?);

    out.push(fixture(
        "quantum representation: single setting and outcome",
        ProblemInstance::QuantumRepresentation { p: Matrix::from_rows(vec![vec![int(1)]]), n: 1, m: 1, d: 2 },
        |f, a| {
            set(f, a, "rho", &scaled_identity(4, rat(1, 4)))?;
            set(f, a, "Q_0", &QMatrix::identity(2))?;
            set(f, a, "P_0", &QMatrix::identity(2))
        },
    )?);

    out.push(fixture(
        "quantum representation: maximally mixed state, trivial POVMs",
        ProblemInstance::QuantumRepresentation {
            p: Matrix::from_fn(4, 4, |_, _| rat(1, 4)),
            n: 2,
            m: 2,
            d: 2,
        },
        |f, a| {
            set(f, a, "rho", &scaled_identity(4, rat(1, 4)))?;
            // two effects 𝟙/2 stacked
            let stacked = QMatrix::from_fn(4, 2, |r, c| {
                if r % 2 == c {
                    Complex::real(rat(1, 2))
                } else {
                    Complex::zero()
                }
            });
            for k in 0..2 {
                set(f, a, &format!("Q_{k}"), &stacked)?;
                set(f, a, &format!("P_{k}"), &stacked)?;
            }
            Ok(())
        },
    )?);

    let v = cayley_unitary(&real_matrix(vec![vec![int(0), rat(1, 2)], vec![rat(1, 2), int(1)]]));
    let v_ = v.clone();
    out.push(fixture(
        "birkhoff: unitary conjugation",
        ProblemInstance::Birkhoff { choi: unitary_choi(&v), d: 2, n: 1, terms: None },
        move |f, a| {
            set(f, a, "lambda", &point_mass(16, 0))?;
            set(f, a, "U_0", &v_)?;
            for i in 1..16 {
                set(f, a, &format!("U_{i}"), &QMatrix::identity(2))?;
            }
            Ok(())
        },
    )?);

    let basis_state = |k: usize| projector(&unit_vec(2, k, 1));
    out.push(fixture(
        "zero error: identity channel, two orthogonal states",
        ProblemInstance::ZeroError { choi: identity_choi(2), d: 2, n: 1, m: 2 },
        |f, a| {
            set(f, a, "rho_0", &basis_state(0))?;
            set(f, a, "rho_1", &basis_state(1))
        },
    )?);

    out.push(fixture(
        "zero error: identity channel, restricted to one state",
        ProblemInstance::ZeroError { choi: identity_choi(2), d: 2, n: 1, m: 1 },
        |f, a| set(f, a, "rho_0", &basis_state(0)),
    )?);

    Ok(out)
}
