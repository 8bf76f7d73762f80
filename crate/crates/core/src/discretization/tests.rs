use approx::assert_abs_diff_eq;

use super::*;
use crate::matrix::{restriction, IndexSubset, OperatorMatrix};

fn max_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn two_point_chebyshev_matrix() {
    let g = chebyshev(2).unwrap();
    assert_eq!(g.points, vec![1.0, -1.0]);
    let expected = [[0.5, -0.5], [0.5, -0.5]];
    for i in 0..2 {
        for j in 0..2 {
            assert_abs_diff_eq!(g.d.get(i, j), expected[i][j], epsilon = 1e-15);
        }
    }
}

#[test]
fn chebyshev_points_are_symmetric() {
    let x = chebyshev_points(9);
    assert_eq!(x[0], 1.0);
    assert_eq!(x[8], -1.0);
    assert_eq!(x[4], 0.0);
    for j in 0..9 {
        assert_eq!(x[j], -x[8 - j]);
    }
}

#[test]
fn derivative_is_exact_on_polynomials() {
    let n = 12;
    let g = chebyshev(n).unwrap();
    for p in 0..n {
        let f: Vec<f64> = g.points.iter().map(|x| x.powi(p as i32)).collect();
        let exact: Vec<f64> = g
            .points
            .iter()
            .map(|x| if p == 0 { 0.0 } else { p as f64 * x.powi(p as i32 - 1) })
            .collect();
        let df = g.d.apply(&f).unwrap();
        assert!(max_err(&df, &exact) < 1e-11, "degree {p}");
    }
}

#[test]
fn derivative_converges_spectrally() {
    let g = chebyshev(24).unwrap();
    let f: Vec<f64> = g.points.iter().map(|x| x.exp() * (3.0 * x).sin()).collect();
    let exact: Vec<f64> = g
        .points
        .iter()
        .map(|x| x.exp() * ((3.0 * x).sin() + 3.0 * (3.0 * x).cos()))
        .collect();
    assert!(max_err(&g.d.apply(&f).unwrap(), &exact) < 1e-10);
}

#[test]
fn clenshaw_curtis_three_points() {
    let w = clenshaw_curtis(3).unwrap();
    assert_abs_diff_eq!(w[0], 1.0 / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(w[1], 4.0 / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(w[2], 1.0 / 3.0, epsilon = 1e-15);
}

#[test]
fn clenshaw_curtis_integrates_polynomials() {
    for n in [5, 8, 13] {
        let x = chebyshev_points(n);
        let w = clenshaw_curtis(n).unwrap();
        for p in 0..n {
            let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert_abs_diff_eq!(integral, exact, epsilon = 1e-13);
        }
    }
}

#[test]
fn quadrature_matrix_repeats_the_integral() {
    let w = clenshaw_curtis(6).unwrap();
    let q = quadrature_matrix(&w, 6).unwrap();
    let x = chebyshev_points(6);
    let f: Vec<f64> = x.iter().map(|x| x * x).collect();
    for v in q.apply(&f).unwrap().iter() {
        assert_abs_diff_eq!(*v, 2.0 / 3.0, epsilon = 1e-14);
    }
    assert!(quadrature_matrix(&w, 5).is_err());
}

#[test]
fn dirichlet_poisson_recovers_quadratic() {
    // u'' = 2 with u(±1) = 1 has u = x²
    let n = 10;
    let g = chebyshev(n).unwrap();
    let d2 = g.second_derivative();
    let interior = IndexSubset::new((1..n - 1).collect(), n).unwrap();
    let boundary = interior.complement();
    let a = crate::matrix::restrict_operator(&d2, &interior, &interior).unwrap();
    let b_block = crate::matrix::restrict_operator(&d2, &boundary, &interior).unwrap();
    let lift = b_block.apply(&[1.0, 1.0]).unwrap();
    let rhs: Vec<f64> = lift.iter().map(|l| 2.0 - l).collect();
    let u = crate::matrix::solve_linear(&a, &rhs).unwrap();
    for (k, &i) in interior.indices().iter().enumerate() {
        assert_abs_diff_eq!(u[k], g.points[i].powi(2), epsilon = 1e-12);
    }
}

#[test]
fn mapped_grid_derivative() {
    let g = mapped_thinfilm_grid(64, 0.9).unwrap();
    let d = g.physical_derivative();
    let f: Vec<f64> = g.x.iter().map(|x| (std::f64::consts::FRAC_PI_2 * x).sin()).collect();
    let exact: Vec<f64> = g
        .x
        .iter()
        .map(|x| std::f64::consts::FRAC_PI_2 * (std::f64::consts::FRAC_PI_2 * x).cos())
        .collect();
    assert!(max_err(&d.apply(&f).unwrap(), &exact) < 1e-8);
    let f2: Vec<f64> = g.x.iter().map(|x| x.powi(3)).collect();
    let exact2: Vec<f64> = g.x.iter().map(|x| 6.0 * x).collect();
    assert!(max_err(&g.l_mapped.apply(&f2).unwrap(), &exact2) < 1e-7);
}

#[test]
fn weak_mapping_is_nearly_the_identity() {
    let g = mapped_thinfilm_grid(16, 1e-3).unwrap();
    let x = chebyshev_points(16);
    assert!(max_err(&g.x, &x) < 1e-6);
    assert!(g.gamma.iter().all(|v| (v - 1.0).abs() < 1e-6));
    assert!(mapped_thinfilm_grid(16, 1.0).is_err());
    assert!(mapped_thinfilm_grid(16, 0.0).is_err());
}

#[test]
fn polar_derivative_of_trig_polynomials() {
    let p = polar_grid(16).unwrap();
    let cos: Vec<f64> = p.theta.iter().map(|t| t.cos()).collect();
    let msin: Vec<f64> = p.theta.iter().map(|t| -t.sin()).collect();
    assert!(max_err(&p.d_theta.apply(&cos).unwrap(), &msin) < 1e-10);

    let cos2: Vec<f64> = p.theta.iter().map(|t| t.cos().powi(2)).collect();
    let d_cos2: Vec<f64> = p.theta.iter().map(|t| -2.0 * t.cos() * t.sin()).collect();
    assert!(max_err(&p.d_theta.apply(&cos2).unwrap(), &d_cos2) < 1e-10);

    let ones = vec![1.0; 16];
    assert!(p.d_theta.apply(&ones).unwrap().norm_inf() < 1e-12);
}

#[test]
fn radial_derivative_of_inverse_powers() {
    let rg = rational_radial_grid(30, 0.5).unwrap();
    assert!(rg.r[0].is_infinite());
    assert_eq!(rg.r[30], 1.0);
    let inv_r = rg.inverse_r();
    let d = rg.d_r.apply(&inv_r).unwrap();
    let exact: Vec<f64> = inv_r.iter().map(|v| -v * v).collect();
    assert!(max_err(&d, &exact) < 1e-8);
    // the row at infinity vanishes identically
    assert!(rg.d_r.row_dense(0).iter().all(|&v| v == 0.0));
}

#[test]
fn spherical_laplacian_of_harmonic_functions() {
    let g = spherical_operators(30, 12, 0.5).unwrap();
    let nr1 = g.n_r + 1;
    let inv_r = g.radial.inverse_r();
    let ones = vec![1.0; g.full_len()];
    let lap1 = restriction(&g.interior, g.full_len())
        .unwrap()
        .apply(&g.laplacian.apply(&ones).unwrap())
        .unwrap();
    assert!(lap1.norm_inf() < 1e-9);

    // 1/r and cos θ / r² are harmonic
    let f: Vec<f64> = (0..g.full_len()).map(|idx| inv_r[idx % nr1]).collect();
    let lf = g.laplacian.apply(&f).unwrap();
    let h: Vec<f64> = (0..g.full_len())
        .map(|idx| g.cos_theta[idx / nr1] * inv_r[idx % nr1].powi(2))
        .collect();
    let lh = g.laplacian.apply(&h).unwrap();
    for &i in g.interior.indices() {
        assert!(lf[i].abs() < 1e-7, "1/r at {i}: {}", lf[i]);
        assert!(lh[i].abs() < 1e-7, "cos/r² at {i}: {}", lh[i]);
    }
}

#[test]
fn spherical_blocks_are_consistent() {
    let g = spherical_operators(8, 6, 0.5).unwrap();
    assert_eq!(g.full_len(), 54);
    assert_eq!(g.lap_f.shape(), (g.interior_len(), g.finite_len()));
    assert_eq!(g.lap_inf.shape(), (g.interior_len(), g.n_t));
    assert_eq!(g.normal_f.shape(), (g.n_t, g.finite_len()));

    // splitting a full vector and applying the blocks matches the full operator
    let u: Vec<f64> = (0..g.full_len()).map(|i| (0.37 * i as f64).sin()).collect();
    let uf = g.finite.gather(&u);
    let ui = g.infinity.gather(&u);
    let full = g.laplacian.apply(&u).unwrap();
    let split = g
        .lap_f
        .apply(&uf)
        .unwrap()
        .axpy(1.0, &g.lap_inf.apply(&ui).unwrap())
        .unwrap();
    assert!(max_err(&g.interior.gather(&full), &split) < 1e-9);

    let ones_f = vec![1.0; g.finite_len()];
    let ones_i = vec![1.0; g.n_t];
    let gn = g
        .normal_f
        .apply(&ones_f)
        .unwrap()
        .axpy(1.0, &g.normal_inf.apply(&ones_i).unwrap())
        .unwrap();
    assert!(gn.norm_inf() < 1e-10);

    // surface and interior columns partition the finite block
    let s = g.normal_s.apply(&g.surface.gather(&ones_f)).unwrap();
    let i = g.normal_i.apply(&g.interior_f.gather(&ones_f)).unwrap();
    let whole = g.normal_f.apply(&ones_f).unwrap();
    assert!(max_err(&s.axpy(1.0, &i).unwrap(), &whole) < 1e-10);
}

#[test]
fn spherical_operators_commute_with_kron_order() {
    // angular and radial factors act on different indices
    let g = spherical_operators(6, 5, 0.5).unwrap();
    let ab = g.grad_r.matmul(&g.grad_theta).unwrap();
    let ba = g.grad_theta.matmul(&g.grad_r).unwrap();
    // grad_theta carries 1/r on the radial index, so only the pure factors commute
    let d_t_kron = crate::matrix::kron(&g.polar.d_theta, &OperatorMatrix::identity(7)).unwrap();
    let x = g.grad_r.matmul(&d_t_kron).unwrap();
    let y = d_t_kron.matmul(&g.grad_r).unwrap();
    assert!(x.max_abs_diff(&y) < 1e-9);
    assert_eq!(ab.shape(), ba.shape());
}

#[test]
fn surface_operators() {
    let g = spherical_operators(8, 16, 0.5).unwrap();
    let cos = &g.cos_theta;
    let d = g.grad_s.apply(cos).unwrap();
    let exact: Vec<f64> = g.sin_theta.iter().map(|s| -s).collect();
    assert!(max_err(&d, &exact) < 1e-10);
    // surface divergence of sin θ is 2 cos θ on the unit sphere
    let div = g.div_s.apply(&g.sin_theta).unwrap();
    let exact: Vec<f64> = cos.iter().map(|c| 2.0 * c).collect();
    assert!(max_err(&div, &exact) < 1e-10);
}

#[test]
fn coefficients_of_a_single_chebyshev_polynomial() {
    let n = 9;
    let x = chebyshev_points(n);
    let t3: Vec<f64> = x.iter().map(|x| 4.0 * x.powi(3) - 3.0 * x).collect();
    let a = chebyshev_coefficients(&t3).unwrap();
    for (k, &ak) in a.iter().enumerate() {
        let expected = if k == 3 { (n - 1) as f64 } else { 0.0 };
        assert_abs_diff_eq!(ak, expected, epsilon = 1e-12);
    }
    let ones = vec![1.0; n];
    let a = chebyshev_coefficients(&ones).unwrap();
    assert_abs_diff_eq!(a[0], 2.0 * (n - 1) as f64, epsilon = 1e-12);
    assert!(chebyshev_coefficients(&[1.0]).is_err());
}

#[test]
fn coefficients_match_direct_even_extension_dft() {
    let vals = [0.3, -1.2, 2.5, 0.7, -0.4, 1.1];
    let n = vals.len();
    let mut ext: Vec<f64> = vals.to_vec();
    ext.extend(vals[1..n - 1].iter().rev());
    let m = ext.len();
    let a = chebyshev_coefficients(&vals).unwrap();
    for k in 0..n {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, v) in ext.iter().enumerate() {
            let ph = -2.0 * std::f64::consts::PI * (k * j) as f64 / m as f64;
            re += v * ph.cos();
            im += v * ph.sin();
        }
        assert_abs_diff_eq!(a[k], re.hypot(im), epsilon = 1e-12);
    }
}
