//! Worked instances with known answers, used by tests, the guide and the CLI.

use crate::error::Result;
use crate::grouprep::CatalogSpec;
use crate::invariantring::{expand_invariants, parse_invariant, presentation};
use crate::linalg::Mat;
use crate::polyring::{parse_polynomial, Monomial, Polynomial, VarNames};
use crate::rational::{parse_rational, q, Q};

use super::certificate::{Certificate, CertificateBody, Gram, InvariantBlock, Value};
use super::{algorithm_one, algorithm_one_upto, GeneratorBundle};

/// Sextic in `x, y` invariant under the symmetries of the square, with
/// `f^sos = −3825/4096`.
pub const D4_SEXTIC: &str = "x^6 + y^6 - x^4*y^2 - x^2*y^4 - x^4 - y^4 - x^2 - y^2 + 3*x^2*y^2 + 1";

/// Symmetric quartic in `x, y, z` with `f^sos ≈ −2.112913882`.
pub const S3_QUARTIC: &str = "x^4 + y^4 + z^4 - 4*x*y*z + x + y + z";

/// Optimal value of [`S3_QUARTIC`] to the printed precision.
pub const S3_QUARTIC_BOUND: f64 = -2.112913882;

/// One point of the minimizing orbit of [`S3_QUARTIC`], to three decimals.
pub const S3_MINIMIZER: [f64; 3] = [0.988, -1.102, -1.102];

/// Quartic form in `s, t, u, v` through elementary symmetric polynomials.
pub const SOTTILE_QUARTIC: &str = "16*e2^2 - 48*e1*e3 + 192*e4";

pub fn xy() -> VarNames {
    VarNames::new(&["x", "y"])
}

pub fn xyz() -> VarNames {
    VarNames::new(&["x", "y", "z"])
}

pub fn d4_sextic() -> Polynomial {
    parse_polynomial(D4_SEXTIC, &xy()).expect("valid fixture")
}

pub fn s3_quartic() -> Polynomial {
    parse_polynomial(S3_QUARTIC, &xyz()).expect("valid fixture")
}

fn qs(texts: &[&str]) -> Vec<Q> {
    texts
        .iter()
        .map(|t| parse_rational(t).expect("valid rational"))
        .collect()
}

fn qmat(rows: &[&[&str]]) -> Mat<Q> {
    Mat::from_rows(rows.iter().map(|r| qs(r)).collect())
}

/// Rational certificate of `f + 2113/1000` for [`S3_QUARTIC`]: a 4×4 Gram matrix on
/// `(1, e₁, e₂, e₁²)` for the trivial part and a 3×3 one on rows
/// `(1, e₁)` of the first and `1` of the second generator of the standard part.
pub fn s3_rational_certificate() -> Result<Certificate> {
    let bundle = algorithm_one(&CatalogSpec::Symmetric(3))?;
    let s1 = qmat(&[
        &["2113/1000", "1/2", "79/94", "-233/496"],
        &["1/2", "13261/34968", "-560/11511", "-74/1279"],
        &["79/94", "-560/11511", "1439/2454", "-85469/377916"],
        &["-233/496", "-74/1279", "-85469/377916", "85/693"],
    ]);
    let s3 = qmat(&[
        &["79/282", "37/1279", "-2/9"],
        &["37/1279", "304/693", "749/1636"],
        &["-2/9", "749/1636", "3469/4908"],
    ]);
    let trivial_rows = vec![
        (0, vec![0, 0, 0]),
        (0, vec![1, 0, 0]),
        (0, vec![0, 1, 0]),
        (0, vec![2, 0, 0]),
    ];
    let standard_rows = vec![(0, vec![0, 0, 0]), (0, vec![1, 0, 0]), (1, vec![0, 0, 0])];
    let block = |label: &str, rows: Vec<(usize, Vec<u32>)>, gram: Mat<Q>| -> InvariantBlock {
        let k = bundle
            .bases
            .iter()
            .position(|b| b.label() == label)
            .expect("catalog irrep");
        InvariantBlock {
            irrep: bundle.bases[k].irrep(),
            label: label.to_string(),
            gamma: bundle.bases[k].gamma().to_vec(),
            vectors: bundle.bases[k].vectors().to_vec(),
            pi: bundle.pis[k].entries().to_vec(),
            rows,
            gram: Gram::Exact(gram),
        }
    };
    Ok(Certificate {
        group: "symmetric:3".into(),
        lambda: Value::Exact(Q::new((-2113).into(), 1000.into())),
        residual: None,
        body: CertificateBody::Invariant {
            presentation: bundle.presentation.clone(),
            blocks: vec![block("trivial", trivial_rows, s1), block("[2,1]", standard_rows, s3)],
        },
    })
}

pub fn choi_vars() -> VarNames {
    VarNames::new(&["x1", "x2", "x3", "y1", "y2", "y3"])
}

/// Biquadratic form `B(x; y)`, nonnegative but not a sum of squares.
pub fn choi_form() -> Polynomial {
    parse_polynomial(
        "x1^2*y1^2 + x2^2*y2^2 + x3^2*y3^2 - 2*(x1*x2*y1*y2 + x2*x3*y2*y3 + x3*x1*y3*y1) \
         + x1^2*y2^2 + x2^2*y3^2 + x3^2*y1^2",
        &choi_vars(),
    )
    .expect("valid fixture")
}

/// `(Σᵢ xᵢ² + yᵢ²) · B(x; y)`.
pub fn choi_product() -> Polynomial {
    let norm = parse_polynomial("x1^2 + x2^2 + x3^2 + y1^2 + y2^2 + y3^2", &choi_vars()).expect("valid fixture");
    &norm * &choi_form()
}

const CHOI_PAIRS: [[&str; 3]; 2] = [
    ["x3*y1*y2", "x2*y1*y3", "x1*y2*y3"],
    ["x2*x3*y1", "x1*x3*y2", "x1*x2*y3"],
];

const CHOI_SEXTETS: [[&str; 4]; 6] = [
    ["x2*y2*y3", "x3*y1^2", "x1*y1*y3", "x3*y3^2"],
    ["x1*y1*y2", "x2*y3^2", "x3*y2*y3", "x2*y2^2"],
    ["x1*x2*y2", "x3^2*y1", "x1*x3*y3", "x1^2*y1"],
    ["x1*x3*y1", "x2^2*y3", "x2*x3*y2", "x3^2*y3"],
    ["x2*x3*y3", "x1^2*y2", "x1*x2*y1", "x2^2*y2"],
    ["x3*y1*y3", "x1*y2^2", "x2*y1*y2", "x1*y1^2"],
];

fn monomial(text: &str) -> Monomial {
    let p = parse_polynomial(text, &choi_vars()).expect("valid monomial");
    let m = p.terms().next().expect("nonzero").0.clone();
    m
}

/// Plain certificate `Σⱼ v₁ⱼᵀ Q₁ v₁ⱼ + Σⱼ v₂ⱼᵀ Q₂ v₂ⱼ` of [`choi_product`], one
/// Gram matrix block-diagonal over the concatenated vectors.
pub fn choi_certificate() -> Certificate {
    let q1 = qmat(&[&["1", "-1/2", "-1/2"], &["-1/2", "1", "-1/2"], &["-1/2", "-1/2", "1"]]);
    let q2 = qmat(&[
        &["1", "-1", "1/2", "-1/2"],
        &["-1", "1", "-1/2", "1/2"],
        &["1/2", "-1/2", "1", "-1"],
        &["-1/2", "1/2", "-1", "1"],
    ]);
    let mut monomials = Vec::new();
    let mut blocks: Vec<&Mat<Q>> = Vec::new();
    for v in CHOI_PAIRS {
        monomials.extend(v.iter().map(|t| monomial(t)));
        blocks.push(&q1);
    }
    for v in CHOI_SEXTETS {
        monomials.extend(v.iter().map(|t| monomial(t)));
        blocks.push(&q2);
    }
    let n = monomials.len();
    let mut gram = Mat::<Q>::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.rows() {
                gram.set(at + i, at + j, b.get(i, j).clone());
            }
        }
        at += b.rows();
    }
    Certificate {
        group: "sign changes, cyclic shift and swap of x and y".into(),
        lambda: Value::Exact(q(0)),
        residual: None,
        body: CertificateBody::Plain {
            vars: choi_vars(),
            monomials,
            gram: Gram::Exact(gram),
        },
    }
}

pub fn stuv() -> VarNames {
    VarNames::new(&["s", "t", "u", "v"])
}

/// [`SOTTILE_QUARTIC`] expanded in `s, t, u, v`.
pub fn sottile_quartic() -> Result<Polynomial> {
    let pres = presentation(&CatalogSpec::Symmetric(4))?;
    expand_invariants(&parse_invariant(SOTTILE_QUARTIC, &pres)?, &pres)
}

/// `12(uv + st − sv − tu)² + 12·(1/3)(uv + st + sv + tu − 2vt − 2us)²`.
pub fn sottile_squares() -> Polynomial {
    let vars = stuv();
    let a = parse_polynomial("u*v + s*t - s*v - t*u", &vars).expect("valid fixture");
    let b = parse_polynomial("u*v + s*t + s*v + t*u - 2*v*t - 2*u*s", &vars).expect("valid fixture");
    &(&a * &a).scale(&q(12)) + &(&b * &b).scale(&q(4))
}

/// `x² + (x − x³)²`, invariant under `x ↦ −x` and zero at the origin.
pub fn sign_flip_sextic() -> Polynomial {
    parse_polynomial("x^2 + (x - x^3)^2", &VarNames::new(&["x"])).expect("valid fixture")
}

/// `a·e₁² + b·e₂` in `n` variables.
pub fn symmetric_quadratic(n: usize, a: &Q, b: &Q) -> Polynomial {
    let x = |i| Polynomial::var(n, i);
    let mut e1 = Polynomial::zero(n);
    let mut e2 = Polynomial::zero(n);
    for i in 0..n {
        e1 = &e1 + &x(i);
        for j in i + 1..n {
            e2 = &e2 + &(&x(i) * &x(j));
        }
    }
    &(&e1 * &e1).scale(a) + &e2.scale(b)
}

/// Closed-form SOS criterion for [`symmetric_quadratic`]:
/// `2n·a + (n − 1)·b ≥ 0` and `b ≤ 0`.
pub fn symmetric_quadratic_is_sos(n: usize, a: &Q, b: &Q) -> bool {
    let lhs = a * q(2 * n as i64) + b * q(n as i64 - 1);
    lhs >= q(0) && *b <= q(0)
}

/// Bundle for the symmetric group on `n` coordinates, enough for quadratics.
pub fn symmetric_quadratic_bundle(n: usize) -> Result<GeneratorBundle> {
    algorithm_one_upto(&CatalogSpec::Symmetric(n), Some(1))
}
