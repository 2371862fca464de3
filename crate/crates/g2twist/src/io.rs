//! JSON formats for jets, subspaces, subbundles, flags and loops, plus
//! the named map generators used by the command line.
//!
//! Jets serialize as `{"order": N, "coeffs": {"p,q": [re, im]}}` with
//! zero coefficients omitted; subspaces as `{"basis": [[[re,im]; 7]]}`.
//! Exact-backend values are exported through their float images.

use crate::bundles::JetSubbundle;
use crate::error::{G2Error, Result};
use crate::jet::{Jet, JetVec7};
use crate::loops::MatrixLoop;
use crate::s6::{ac_flag, add_uniton_pair, alpha_construction, chain_line, prop_family, Q5Curve};
use crate::scalar::Scalar;
use crate::twistor::Flag;
use crate::vec7::Vec7;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

pub fn jet_to_json<S: Scalar>(j: &Jet<S>) -> Value {
    let mut coeffs = Map::new();
    for (p, q, c) in j.coeffs() {
        if c.is_zero_tol(0.0) {
            continue;
        }
        let z = c.to_c64();
        coeffs.insert(format!("{p},{q}"), json!([z.re, z.im]));
    }
    json!({ "order": j.order(), "coeffs": Value::Object(coeffs) })
}

pub fn jet_from_json(v: &Value) -> Result<Jet<Complex64>> {
    let order = v
        .get("order")
        .and_then(Value::as_u64)
        .ok_or_else(|| G2Error::Input("jet needs an integer `order`".into()))? as usize;
    let mut jet = Jet::zero(order);
    if let Some(Value::Object(map)) = v.get("coeffs") {
        for (key, val) in map {
            let (p, q) = key
                .split_once(',')
                .ok_or_else(|| G2Error::Input(format!("bad coefficient key `{key}`")))?;
            let (p, q): (usize, usize) = (
                p.trim().parse().map_err(|_| G2Error::Input("bad p".into()))?,
                q.trim().parse().map_err(|_| G2Error::Input("bad q".into()))?,
            );
            if p + q > order {
                return Err(G2Error::Input(format!(
                    "coefficient ({p},{q}) beyond order {order}"
                )));
            }
            let pair = val
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| G2Error::Input("coefficient must be [re, im]".into()))?;
            jet.set_coeff(
                p,
                q,
                Complex64::new(
                    pair[0].as_f64().unwrap_or(0.0),
                    pair[1].as_f64().unwrap_or(0.0),
                ),
            );
        }
    }
    Ok(jet)
}

pub fn vec7_to_json<S: Scalar>(v: &Vec7<S>) -> Value {
    Value::Array(
        v.c.iter()
            .map(|c| {
                let z = c.to_c64();
                json!([z.re, z.im])
            })
            .collect(),
    )
}

pub fn subspace_to_json<S: Scalar>(s: &crate::algebra::Subspace<S>) -> Value {
    json!({ "basis": s.basis().iter().map(vec7_to_json).collect::<Vec<_>>() })
}

pub fn section_to_json<S: Scalar>(s: &JetVec7<S>) -> Value {
    Value::Array(s.c.iter().map(jet_to_json).collect())
}

pub fn section_from_json(v: &Value) -> Result<JetVec7<Complex64>> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 7)
        .ok_or_else(|| G2Error::Input("a section is an array of 7 jets".into()))?;
    let jets: Result<Vec<_>> = arr.iter().map(jet_from_json).collect();
    let jets = jets?;
    Ok(JetVec7::from_fn(|k| jets[k].clone()))
}

pub fn subbundle_to_json<S: Scalar>(b: &JetSubbundle<S>) -> Value {
    json!({
        "order": b.order(),
        "sections": b.sections().iter().map(section_to_json).collect::<Vec<_>>(),
    })
}

pub fn subbundle_from_json(v: &Value, tol: f64) -> Result<JetSubbundle<Complex64>> {
    let sections = v
        .get("sections")
        .and_then(Value::as_array)
        .ok_or_else(|| G2Error::Input("map input needs `sections`".into()))?;
    let secs: Result<Vec<_>> = sections.iter().map(section_from_json).collect();
    JetSubbundle::from_sections(secs?, tol)
}

pub fn flag_to_json<S: Scalar>(f: &Flag<S>) -> Value {
    let legs: Vec<Value> = (-f.s()..=f.s())
        .map(|i| {
            json!({
                "index": i,
                "sections": f.leg(i).sections().iter().map(section_to_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "s": f.s(), "legs": legs })
}

pub fn loop_to_json<S: Scalar>(l: &MatrixLoop<S>) -> Value {
    let mut coeffs = Map::new();
    for d in l.min_deg()..=l.max_deg() {
        if let Some(c) = l.coeff(d) {
            let rows: Vec<Value> = (0..7)
                .map(|r| Value::Array((0..7).map(|k| jet_to_json(c.at(r, k))).collect()))
                .collect();
            coeffs.insert(d.to_string(), Value::Array(rows));
        }
    }
    json!({ "coeffs": Value::Object(coeffs) })
}

pub fn loop_from_json(v: &Value, tol: f64) -> Result<MatrixLoop<Complex64>> {
    let map = v
        .get("coeffs")
        .and_then(Value::as_object)
        .ok_or_else(|| G2Error::Input("loop needs `coeffs`".into()))?;
    let mut degs: Vec<i32> = Vec::new();
    for key in map.keys() {
        degs.push(
            key.parse()
                .map_err(|_| G2Error::Input(format!("bad degree `{key}`")))?,
        );
    }
    let lo = *degs.iter().min().ok_or_else(|| G2Error::Input("empty loop".into()))?;
    let hi = *degs.iter().max().unwrap();
    let mut order = usize::MAX;
    let mut parsed = Vec::new();
    for d in lo..=hi {
        let rows = map
            .get(&d.to_string())
            .and_then(Value::as_array)
            .ok_or_else(|| G2Error::Input(format!("missing coefficient {d}")))?;
        let mut mat_rows = Vec::new();
        for r in rows {
            let row = r
                .as_array()
                .filter(|a| a.len() == 7)
                .ok_or_else(|| G2Error::Input("loop coefficient rows need 7 jets".into()))?;
            let jets: Result<Vec<_>> = row.iter().map(jet_from_json).collect();
            let jets = jets?;
            order = order.min(jets.iter().map(|j| j.order()).min().unwrap_or(0));
            mat_rows.push(jets);
        }
        parsed.push(mat_rows);
    }
    let coeffs = parsed
        .into_iter()
        .map(crate::linalg::JetMat::from_rows)
        .collect();
    Ok(MatrixLoop::from_coeffs(lo, coeffs, tol))
}

/// Named generators for map input.
///
/// - `vacuum_torus`: the strongly conformal map built from the doubly
///   periodic almost complex map; `z0` sets the base point.
/// - `superhorizontal_poly`: the family member G^{(-i)}(f) + f + G^{(i)}(f)
///   of the polynomial superhorizontal curve; `id` = i in 1..=3.
/// - `chain_line_phi`: the s = 2 construction over the chain line.
/// - `geodesic_circle`: a harmonic but non-nilconformal control input.
/// - `from_sections`: raw jet data.
pub fn map_input_from_json(
    v: &Value,
    order: usize,
    tol: f64,
) -> Result<JetSubbundle<Complex64>> {
    let gen = v.get("generator").and_then(Value::as_str);
    let z0 = v
        .get("z0")
        .and_then(Value::as_array)
        .map(|a| {
            Complex64::new(
                a.first().and_then(Value::as_f64).unwrap_or(0.0),
                a.get(1).and_then(Value::as_f64).unwrap_or(0.0),
            )
        })
        .unwrap_or(Complex64::new(0.17, 0.31));
    match gen {
        None | Some("from_sections") => subbundle_from_json(v, tol),
        Some("vacuum_torus") => {
            let f = crate::s6::vacuum_solution(&z0, order.max(8))?;
            let flag = ac_flag(&f, tol.min(1e-8))?;
            add_uniton_pair(&f, flag.leg(1), tol.max(1e-7))
        }
        Some("superhorizontal_poly") => {
            let id = v.get("id").and_then(Value::as_u64).unwrap_or(2) as u32;
            let h = Q5Curve::standard(&z0, &Complex64::new(1.0, 0.0), order.max(10), 1e-9)?;
            prop_family(&h, id.clamp(1, 3), tol.min(1e-8))
        }
        Some("chain_line_phi") => {
            let n = order.max(12);
            let h = Q5Curve::standard(&z0, &Complex64::new(1.0, 0.0), n, 1e-9)?;
            let alpha = chain_line(&h, &Jet::one(n), &Jet::zero(n), &Complex64::new(1.0, 0.0), 1e-9)?;
            alpha_construction(&h, &alpha, tol.min(1e-8))
        }
        Some("geodesic_circle") => Ok(geodesic_circle(order.max(6), z0.re)),
        Some(other) => Err(G2Error::Input(format!("unknown generator `{other}`"))),
    }
}

/// Jet of the equatorial geodesic F = (cos x, sin x, 0, …): harmonic but
/// not conformal, so its derivative endomorphism is not nilpotent.
pub fn geodesic_circle(order: usize, x0: f64) -> JetSubbundle<Complex64> {
    let mut c = Jet::<Complex64>::zero(order);
    let mut s = Jet::<Complex64>::zero(order);
    for d in 0..=order {
        for q in 0..=d {
            let p = d - q;
            let k = p + q;
            let fact: f64 = (1..=p).product::<usize>() as f64 * (1..=q).product::<usize>() as f64;
            let half = 0.5_f64.powi(k as i32);
            let (cc, ss) = match k % 4 {
                0 => (x0.cos(), x0.sin()),
                1 => (-x0.sin(), x0.cos()),
                2 => (-x0.cos(), -x0.sin()),
                _ => (x0.sin(), -x0.cos()),
            };
            c.set_coeff(p, q, Complex64::new(cc * half / fact, 0.0));
            s.set_coeff(p, q, Complex64::new(ss * half / fact, 0.0));
        }
    }
    let sec = JetVec7::from_fn(|k| match k {
        0 => c.clone(),
        1 => s.clone(),
        _ => Jet::zero(order),
    });
    JetSubbundle::from_sections(vec![sec], 1e-9).expect("geodesic section is a frame")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_round_trip() {
        let mut j = Jet::<Complex64>::zero(3);
        j.set_coeff(1, 0, Complex64::new(0.5, -2.0));
        j.set_coeff(0, 2, Complex64::new(0.0, 1.0));
        let back = jet_from_json(&jet_to_json(&j)).unwrap();
        assert_eq!(j, back);
    }

    #[test]
    fn subbundle_round_trip() {
        let b = geodesic_circle(4, 0.2);
        let back = subbundle_from_json(&subbundle_to_json(&b), 1e-9).unwrap();
        assert!(b.equals_at_base(&back, 1e-12));
    }

    #[test]
    fn generator_dispatch() {
        let v = serde_json::json!({"generator": "vacuum_torus", "z0": [0.1, 0.2]});
        let phi = map_input_from_json(&v, 8, 1e-9).unwrap();
        assert_eq!(phi.rank(), 3);
        let bad = serde_json::json!({"generator": "nope"});
        assert!(map_input_from_json(&bad, 8, 1e-9).is_err());
    }
}
