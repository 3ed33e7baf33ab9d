use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rolling_twistor::cartan::{g2_row, quartic_at, report_from_rows};
use rolling_twistor::distribution::{growth_step, growth_vector_with_step, Vec5};
use rolling_twistor::embedding::{self, MeshFamily, RevolutionMesh};
use rolling_twistor::oracle::{cartan_from_weyl, oracle_residual};
use rolling_twistor::rolling::{self, ControlCurve};
use rolling_twistor::{fmt_sig, Epsilon, Error, RollingPair};

use crate::config::{Common, EmbedArgs, Format, GrowthArgs, MeshKind, OracleArgs, QuarticArgs, RollArgs, SurfacePair};
use crate::{CliError, Verdict};

type Out = Result<Verdict, CliError>;

/// Tables are assembled in memory first so a failure leaves no partial file.
fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut lock = std::io::stdout().lock();
            lock.write_all(text.as_bytes()).and_then(|_| lock.flush()).map_err(|e| CliError::Core(Error::Io(e)))
        }
    }
}

fn lambda_of(pair: &SurfacePair) -> Result<f64, CliError> {
    pair.s2.constant_curvature().ok_or_else(|| {
        CliError::Usage(format!("the closed-form quartic needs a constant-curvature second surface, got {}", pair.s2))
    })
}

fn sample_points(pair: &RollingPair, n: usize, seed: u64) -> Vec<Vec5> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = pair.s1.default_range();
    let (c, d) = pair.s2.default_range();
    (0..n)
        .map(|_| [rng.gen_range(a..b), rng.gen_range(0.0..TAU), rng.gen_range(c..d), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)])
        .collect()
}

fn row(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(fmt_sig).collect::<Vec<_>>().join(",")
}

pub fn quartic(common: &Common, args: &QuarticArgs, verdict: bool) -> Out {
    common.check_format(Format::Csv)?;
    let lambda = lambda_of(&args.pair)?;
    let xs = match args.rho {
        Some(r) => r.values(),
        None => {
            if args.grid == 0 {
                return Err(CliError::Core(Error::EmptyGrid));
            }
            let (a, b) = args.pair.s1.default_range();
            crate::config::Range { start: a, end: b, count: args.grid }.values()
        }
    };
    let rows = xs
        .par_iter()
        .map(|&x| g2_row(&args.pair.s1, lambda, [x, 0.0], args.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let report = report_from_rows(rows, args.tol);

    let mut text = String::new();
    let cmd = if verdict { "g2check" } else { "quartic" };
    writeln!(text, "# {cmd} s1={} s2={} lambda={} tol={}", args.pair.s1, args.pair.s2, fmt_sig(lambda), fmt_sig(args.tol)).unwrap();
    writeln!(text, "# x,y,kappa,A1,A2,A3,A4,A5,scaled_max,tag").unwrap();
    for r in &report.rows {
        let nums = row([r.point[0], r.point[1], r.kappa].into_iter().chain(r.quartic.coeffs).chain([r.quartic.scaled_max()]));
        // root types like [2,2] carry commas, so the tag is quoted
        writeln!(text, "{nums},\"{}\"", r.tag).unwrap();
    }
    let g2 = report.is_g2();
    if verdict {
        writeln!(text, "# verdict={} max_scaled={}", if g2 { "G2" } else { "not-G2" }, fmt_sig(report.max_scaled)).unwrap();
    }
    emit(common, &text)?;
    Ok(match (verdict, g2) {
        (false, _) => Verdict::Done,
        (true, true) => Verdict::Affirmative,
        (true, false) => Verdict::Negative,
    })
}

pub fn roll(common: &Common, args: &RollArgs) -> Out {
    common.check_format(Format::Csv)?;
    let pair = RollingPair::new(args.pair.s1, args.pair.s2);
    let mut ctrl = match &args.controls {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            ControlCurve::parse_csv(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => ControlCurve::constant(args.control[0], args.control[1]),
    };
    if args.normalize {
        ctrl = ctrl.normalized();
    }
    let start = args.start.unwrap_or_else(|| {
        let mid = |(a, b): (f64, f64)| 0.5 * (a + b);
        [mid(pair.s1.default_range()), 0.0, mid(pair.s2.default_range()), 0.0, 0.0]
    });
    let traj = rolling::integrate(&pair, start, &ctrl, args.dt, args.t_end)?;
    let slip = rolling::no_slip_residual(&traj, &pair)?;
    let twist = rolling::no_twist_residual(&traj, &pair, args.v0)?;
    let (l1, l2) = rolling::contact_arclengths(&traj, &pair)?;

    let mut buf = Vec::new();
    writeln!(buf, "# roll s1={} s2={} normalize={}", pair.s1, pair.s2, args.normalize).map_err(Error::Io)?;
    traj.write_csv(&mut buf)?;
    let summary = format!(
        "# summary no_slip={} no_twist={} L1={} L2={} holonomy={}",
        fmt_sig(slip),
        fmt_sig(twist),
        fmt_sig(l1),
        fmt_sig(l2),
        fmt_sig(traj.holonomy())
    );
    writeln!(buf, "{summary}").map_err(Error::Io)?;
    emit(common, std::str::from_utf8(&buf).expect("ascii table"))?;
    if common.out.is_some() {
        println!("{summary}");
    }
    Ok(Verdict::Done)
}

pub fn oracle(common: &Common, args: &OracleArgs) -> Out {
    common.check_format(Format::Csv)?;
    let pair = RollingPair::new(args.pair.s1, args.pair.s2);
    let points = match args.point {
        Some(p) => vec![p],
        None => sample_points(&pair, args.points, args.seed),
    };
    if points.is_empty() {
        return Err(CliError::Core(Error::EmptyGrid));
    }
    let rows = points
        .par_iter()
        .map(|p| {
            let closed = quartic_at(&pair, p)?;
            let weyl = cartan_from_weyl(&pair, p, args.fd_step)?;
            let residual = oracle_residual(&weyl, &closed);
            // a vanishing closed form must meet Weyl noise; otherwise the
            // two quartics must agree projectively
            let agree = if closed.is_zero() { weyl.coefficients_vanish() } else { residual < args.tol && !weyl.coefficients_vanish() };
            Ok((*p, closed, weyl, residual, agree))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut text = String::new();
    writeln!(text, "# oracle s1={} s2={} fd_step={} tol={} seed={}", pair.s1, pair.s2, fmt_sig(args.fd_step), fmt_sig(args.tol), args.seed)
        .unwrap();
    writeln!(text, "# x,y,u,v,phi,A1,A2,A3,A4,A5,W1,W2,W3,W4,W5,residual,weyl_norm,weyl_noise,closed_zero,weyl_flat,agree").unwrap();
    let mut all = true;
    for (p, closed, weyl, residual, agree) in &rows {
        all &= agree;
        let nums = row(p.iter().copied().chain(closed.coeffs).chain(weyl.quartic.coeffs).chain([*residual, weyl.weyl_norm, weyl.weyl_noise]));
        writeln!(text, "{nums},{},{},{}", closed.is_zero(), weyl.conformally_flat(), agree).unwrap();
    }
    writeln!(text, "# verdict={}", if all { "agree" } else { "disagree" }).unwrap();
    emit(common, &text)?;
    Ok(if all { Verdict::Affirmative } else { Verdict::Negative })
}

pub fn embed(common: &Common, args: &EmbedArgs) -> Out {
    common.check_format(Format::Mesh)?;
    let family = match args.family {
        MeshKind::G2 => MeshFamily::G2(
            Epsilon::from_int(args.eps).ok_or_else(|| CliError::Usage(format!("--eps must be -1, 0 or 1, got {}", args.eps)))?,
        ),
        MeshKind::NegativeCurvature => MeshFamily::NegativeCurvature,
    };
    let (range, nr) = match args.rho {
        Some(r) if r.count < 2 => return Err(CliError::Usage("a mesh needs at least 2 radial rows".into())),
        Some(r) => ((r.start, r.end), r.count),
        None => (embedding::default_range(family), 64),
    };
    match &common.out {
        Some(path) => {
            embedding::emit_mesh(family, range, nr, args.nphi, path)?;
        }
        None => {
            let mesh = RevolutionMesh::build(family, range, nr, args.nphi)?;
            let mut buf = Vec::new();
            mesh.write(&mut buf)?;
            emit(common, std::str::from_utf8(&buf).expect("ascii mesh"))?;
        }
    }
    Ok(Verdict::Done)
}

pub fn growth(common: &Common, args: &GrowthArgs) -> Out {
    common.check_format(Format::Csv)?;
    let pair = RollingPair::new(args.pair.s1, args.pair.s2);
    let points = sample_points(&pair, args.points, args.seed);
    if points.is_empty() {
        return Err(CliError::Core(Error::EmptyGrid));
    }
    let rows = points
        .par_iter()
        .map(|p| {
            let h = args.fd_step.unwrap_or_else(|| growth_step(p));
            match growth_vector_with_step(&pair, p, h) {
                Ok(g) => Ok((*p, Some(g), "ok".to_string())),
                Err(Error::IllConditionedRank { ratio, .. }) => Ok((*p, None, format!("ill-conditioned:{}", fmt_sig(ratio)))),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut text = String::new();
    writeln!(text, "# growth s1={} s2={} seed={}", pair.s1, pair.s2, args.seed).unwrap();
    writeln!(text, "# x,y,u,v,phi,r1,r2,r3,status").unwrap();
    let mut generic = true;
    for (p, g, status) in &rows {
        generic &= *g == Some([2, 3, 5]);
        let ranks = g.map_or(",,".to_string(), |g| format!("{},{},{}", g[0], g[1], g[2]));
        writeln!(text, "{},{ranks},{status}", row(p.iter().copied())).unwrap();
    }
    writeln!(text, "# verdict={}", if generic { "(2,3,5)" } else { "degenerate" }).unwrap();
    emit(common, &text)?;
    Ok(if generic { Verdict::Affirmative } else { Verdict::Negative })
}
