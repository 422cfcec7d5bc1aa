use num_traits::ToPrimitive;
use serde_json::{json, Value};

use casimir_core::hurwitz::{a_bracket, hurwitz_gf, hurwitz_number, hurwitz_table, hurwitz_tail};
use casimir_core::measures::{
    deviation_check, tv_decoupling, G1Sampler, GnSampler, MeasureKind, MeasureSpec, QUniformSampler, RandomSource,
    SampleHeader, SampleRecord,
};
use casimir_core::partition::partition_count;
use casimir_core::partition_function::{
    expansion_coeff, expansion_coeff_routes, limit_value, moment_f_bruteforce, moment_f_closed, theta_moment,
    verify_expansion, zn_bruteforce, zn_chiral, Truncation,
};
use casimir_core::series::{euler_phi, inverse_phi, theta, TailModel, TruncatedSeries};
use casimir_core::weight::{casimir_decomposed, casimir_direct, for_each_weight_in_box, phi_n, phi_n_inverse};
use casimir_core::{Error, HighestWeight, Result};

use crate::config::{Command, Measure, RunConfig, SeriesName};
use crate::output::{cert, cert_cells, num, Artifact, Table};

pub fn execute(command: &Command, run: &RunConfig) -> Result<Artifact> {
    match command {
        Command::Zn => zn(run),
        Command::Chiral { sector } => {
            let (q, rank) = (run.require_q()?, run.require_rank()?);
            let z = zn_chiral(rank, q, run.m_part, (*sector).into())?;
            let [v, e] = cert_cells(z);
            Ok(Artifact::new(
                json!({ "N": rank, "q": q, "z": cert(z) }),
                Table { header: vec!["N", "q", "value", "error"], rows: vec![vec![rank.to_string(), num(q), v, e]] },
            ))
        }
        Command::Coeffs => coeffs(run),
        Command::Verify => {
            let (t, grid) = (run.require_t()?, run.require_grid()?);
            eprintln!("verify: {} grid points, order {}", grid.len(), run.p);
            let report = verify_expansion(&grid, t, run.p, run.truncation()?, run.m_series)?;
            let rows = report
                .csv_rows()
                .into_iter()
                .map(|(s, n, v, e, r)| vec![s, n.to_string(), num(v), num(e), r.to_string()])
                .collect();
            let result = serde_json::to_value(&report).map_err(|e| Error::Domain(e.to_string()))?;
            Ok(Artifact::new(result, Table { header: vec!["sector", "N", "residual", "error", "resolved"], rows }))
        }
        Command::Hurwitz { n_max, k_max } => hurwitz(*n_max, *k_max),
        Command::Series { which, genus } => series(run, *which, *genus),
        Command::Moments { k, genus, ell, raw_size } => moments(run, *k, *genus, *ell, *raw_size),
        Command::Sample { measure, count, stream, m_cap, tolerance } => {
            sample(run, *measure, *count, *stream, *m_cap, *tolerance)
        }
        Command::Deviation => {
            let (q, grid) = (run.require_q()?, run.require_grid()?);
            let rows = deviation_check(q, &grid)?;
            let table = rows
                .iter()
                .map(|r| {
                    let [lp, le] = cert_cells(r.length_probability);
                    let [sp, se] = cert_cells(r.size_probability);
                    vec![
                        r.n.to_string(),
                        lp,
                        le,
                        num(r.length_bound),
                        sp,
                        se,
                        num(r.size_bound),
                        r.length_holds.to_string(),
                        r.size_holds.to_string(),
                    ]
                })
                .collect();
            let result = json!({ "q": q, "rows": rows });
            let mut a = Artifact::new(
                result,
                Table {
                    header: vec![
                        "N",
                        "length_probability",
                        "length_error",
                        "length_bound",
                        "size_probability",
                        "size_error",
                        "size_bound",
                        "length_holds",
                        "size_holds",
                    ],
                    rows: table,
                },
            );
            if rows.iter().any(|r| !r.length_holds || !r.size_holds) {
                a.status = 3;
            }
            Ok(a)
        }
        Command::Tv => tv(run),
        Command::Selftest => selftest(),
    }
}

fn zn(run: &RunConfig) -> Result<Artifact> {
    let q = run.require_q()?;
    let trunc = run.truncation()?;
    let ranks = match (&run.rank, &run.grid) {
        (Some(_), _) => vec![run.require_rank()?],
        (None, Some(_)) => run.require_grid()?,
        (None, None) => return Err(Error::InvalidParameter("`zn` needs --N or --N-grid".into())),
    };
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for rank in ranks {
        let z = zn_bruteforce(rank, q, trunc)?;
        let [v, e] = cert_cells(z);
        rows.push(vec![rank.to_string(), num(q), v, e]);
        records.push(json!({ "N": rank, "z": cert(z) }));
    }
    let limit = limit_value(q, run.m_series)?;
    Ok(Artifact::new(
        json!({ "q": q, "values": records, "limit": cert(limit) }),
        Table { header: vec!["N", "q", "value", "error"], rows },
    ))
}

fn coeffs(run: &RunConfig) -> Result<Artifact> {
    let t = run.require_t()?;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for k in 0..=run.p {
        let a = expansion_coeff(k, t, run.m_series)?;
        let [v, e] = cert_cells(a);
        rows.push(vec![format!("a{}", 2 * k), v, e]);
        records.push(json!({ "name": format!("a{}", 2 * k), "k": 2 * k, "coefficient": cert(a) }));
    }
    Ok(Artifact::new(
        json!({ "t": t, "q": run.q, "coefficients": records }),
        Table { header: vec!["name", "value", "error"], rows },
    ))
}

fn big_json(v: &num_bigint::BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

fn hurwitz(n_max: u32, k_max: u32) -> Result<Artifact> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("--n-max must be positive".into()));
    }
    let ks: Vec<u32> = (0..=k_max).map(|k| 2 * k).collect();
    let table = hurwitz_table(n_max, &ks);
    let rows = table.iter().map(|(n, k, v)| vec![n.to_string(), k.to_string(), v.to_string()]).collect();
    let records: Vec<Value> = table.iter().map(|(n, k, v)| json!({ "n": n, "k": k, "H": big_json(v) })).collect();
    let counts: Vec<Value> = (1..=n_max).map(|n| json!(partition_count(n as usize).to_string())).collect();
    Ok(Artifact::new(
        json!({ "base_genus": 1, "rows": records, "partition_counts": counts }),
        Table { header: vec!["n", "k", "H"], rows },
    ))
}

fn series(run: &RunConfig, which: SeriesName, genus: u32) -> Result<Artifact> {
    let degree = run.m_series;
    let (s, tail): (TruncatedSeries, TailModel) = match which {
        SeriesName::Phi => (euler_phi(degree), TailModel::UNIT),
        SeriesName::InversePhi => (inverse_phi(degree), TailModel::PARTITION),
        SeriesName::Theta => (theta(degree), TailModel::THETA),
        SeriesName::Hurwitz => (hurwitz_gf(genus, degree)?, hurwitz_tail(genus, 0)),
    };
    let value = run.q.map(|q| s.evaluate(q, tail)).transpose()?;
    let rows = s.coefficients().iter().enumerate().map(|(d, c)| vec![d.to_string(), c.to_string()]).collect();
    Ok(Artifact::new(
        json!({ "series": which, "genus": genus, "dump": s.to_json(), "value": value.map(cert) }),
        Table { header: vec!["degree", "coefficient"], rows },
    ))
}

fn moments(run: &RunConfig, k: u32, genus: u32, ell: u32, raw_size: u32) -> Result<Artifact> {
    let q = run.require_q()?;
    let deg = run.m_series;
    let named = [("theta_moment", theta_moment(k, q, deg)?), ("f_closed", moment_f_closed(k, q, deg)?)];
    let brute = moment_f_bruteforce(k, q, raw_size)?;
    let bracket = a_bracket(genus, ell, q, deg)?;
    let all = [named[0], named[1], ("f_enumerated", brute.enumerated), ("f_raw", brute.raw), ("a_bracket", bracket)];
    if !named[1].1.agrees_with(&brute.enumerated) {
        return Err(Error::CrossRouteDisagreement {
            quantity: format!("E[F^{k}]"),
            left: named[1].1.value,
            right: brute.enumerated.value,
            allowed: named[1].1.error + brute.enumerated.error,
        });
    }
    let rows = all
        .iter()
        .map(|(name, v)| {
            let [a, b] = cert_cells(*v);
            vec![name.to_string(), a, b]
        })
        .collect();
    let mut result = json!({ "q": q, "k": k, "genus": genus, "ell": ell });
    for (name, v) in all {
        result[name] = cert(v);
    }
    Ok(Artifact::new(result, Table { header: vec!["quantity", "value", "error"], rows }))
}

fn sample(
    run: &RunConfig,
    measure: Measure,
    count: usize,
    stream: u64,
    m_cap: u32,
    tolerance: f64,
) -> Result<Artifact> {
    let q = run.require_q()?;
    let mut rng = RandomSource::with_stream(run.seed, stream);
    let (kind, records, extra): (MeasureKind, Vec<SampleRecord>, Value) = match measure {
        Measure::QUniform => {
            let s = QUniformSampler::new(q, m_cap)?;
            let recs =
                (0..count).map(|_| SampleRecord::Partition { alpha: s.sample(&mut rng).parts().to_vec() }).collect();
            (MeasureKind::QUniform, recs, json!({ "size_cap": m_cap }))
        }
        Measure::G1 => {
            let s = G1Sampler::new(q)?;
            let recs = (0..count).map(|_| SampleRecord::Integer { n: s.sample(&mut rng) }).collect();
            (MeasureKind::G1, recs, Value::Null)
        }
        Measure::Gn => {
            let rank = run.require_rank()?;
            eprintln!("sample: enumerating the truncated support for N = {rank}");
            let s = GnSampler::new(rank, q, run.truncation()?, tolerance)?;
            let recs = (0..count)
                .map(|_| {
                    let t = s.sample_triple(&mut rng);
                    SampleRecord::Triple { alpha: t.alpha.parts().to_vec(), beta: t.beta.parts().to_vec(), n: t.n }
                })
                .collect();
            (MeasureKind::Gn { rank }, recs, json!({ "support": s.support_len(), "tv_error": s.tv_error() }))
        }
    };
    let header = SampleHeader { seed: run.seed, stream, measure: MeasureSpec::new(kind, Some(q))?, count };
    let rows = records
        .iter()
        .map(|r| match r {
            SampleRecord::Triple { alpha, beta, n } => vec![join(alpha), join(beta), n.to_string()],
            SampleRecord::Partition { alpha } => vec![join(alpha)],
            SampleRecord::Integer { n } => vec![n.to_string()],
            SampleRecord::Weight { lambda } => vec![join(lambda)],
        })
        .collect();
    let header_row = match measure {
        Measure::QUniform => vec!["alpha"],
        Measure::G1 => vec!["n"],
        Measure::Gn => vec!["alpha", "beta", "n"],
    };
    let mut a = Artifact::new(json!({ "header": header, "sampler": extra }), Table { header: header_row, rows });
    a.stream = records.iter().map(|r| serde_json::to_value(r).expect("plain record")).collect();
    Ok(a)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn tv(run: &RunConfig) -> Result<Artifact> {
    let q = run.require_q()?;
    let trunc = run.truncation()?;
    let ranks = match run.rank {
        Some(_) => vec![run.require_rank()?],
        None => run.require_grid()?,
    };
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for rank in ranks {
        eprintln!("tv: N = {rank}");
        let d = tv_decoupling(rank, q, trunc)?;
        let [v, e] = cert_cells(d);
        rows.push(vec![rank.to_string(), v, e]);
        records.push(json!({ "N": rank, "tv": cert(d) }));
    }
    Ok(Artifact::new(json!({ "q": q, "values": records }), Table { header: vec!["N", "tv", "error"], rows }))
}

type Check = (&'static str, fn() -> Result<bool>);

fn check_bijection() -> Result<bool> {
    let mut ok = true;
    for rank in 2..=6 {
        for_each_weight_in_box(rank, -2, 2, |lambda| {
            let t = phi_n(lambda);
            ok &= phi_n_inverse(&t, rank).as_ref() == Ok(lambda)
                && casimir_decomposed(&t, rank).ok() == Some(casimir_direct(lambda));
        });
    }
    Ok(ok)
}

fn check_worked_example() -> Result<bool> {
    let lambda = HighestWeight::new(vec![4, 3, 3, 2, 1, -1, -2, -2])?;
    let t = phi_n(&lambda);
    Ok(t.alpha.parts() == [2, 1, 1]
        && t.beta.parts() == [4, 4, 3, 1]
        && t.n == 2
        && casimir_direct(&lambda) == casimir_decomposed(&t, 8)?
        && t.coupling_f() == -16)
}

fn check_hurwitz() -> Result<bool> {
    let mut ok = true;
    for n in 1..=8 {
        ok &= hurwitz_number(1, n, 0)?.to_integer() == partition_count(n as usize).into();
        ok &= hurwitz_number(1, n, 1)?.to_integer() == 0.into();
    }
    let second: Vec<i64> =
        (1..=4).map(|n| hurwitz_number(1, n, 2).map(|h| h.to_integer().to_i64().unwrap())).collect::<Result<_>>()?;
    Ok(ok && second == [0, 2, 18, 80])
}

fn check_coefficient_routes() -> Result<bool> {
    let r = expansion_coeff_routes(1, 2.4, 120)?;
    Ok(r.lemma_assembly.agrees_with(&r.closed_form) && r.closed_form.agrees_with(&r.topological))
}

fn check_moments() -> Result<bool> {
    let closed = moment_f_closed(2, 0.2, 120)?;
    let brute = moment_f_bruteforce(2, 0.2, 12)?;
    Ok(closed.agrees_with(&brute.enumerated) && closed.agrees_with(&brute.raw))
}

fn check_limit() -> Result<bool> {
    let q = 0.2;
    let limit = limit_value(q, 120)?;
    let z8 = zn_bruteforce(8, q, Truncation::with_part(30))?;
    let z16 = zn_bruteforce(16, q, Truncation::with_part(30))?;
    Ok((z16.value - limit.value).abs() < (z8.value - limit.value).abs())
}

fn selftest() -> Result<Artifact> {
    let checks: [Check; 6] = [
        ("bijection", check_bijection),
        ("worked_example", check_worked_example),
        ("hurwitz", check_hurwitz),
        ("coefficient_routes", check_coefficient_routes),
        ("moments", check_moments),
        ("limit", check_limit),
    ];
    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut all = true;
    for (name, check) in checks {
        let (pass, detail) = match check() {
            Ok(p) => (p, String::new()),
            Err(e) => (false, e.to_string()),
        };
        eprintln!("selftest: {name} {}", if pass { "ok" } else { "FAILED" });
        all &= pass;
        rows.push(vec![name.to_string(), pass.to_string(), detail.clone()]);
        records.push(json!({ "check": name, "pass": pass, "detail": detail }));
    }
    let mut a = Artifact::new(
        json!({ "checks": records, "pass": all }),
        Table { header: vec!["check", "pass", "detail"], rows },
    );
    if !all {
        a.status = 3;
    }
    Ok(a)
}
