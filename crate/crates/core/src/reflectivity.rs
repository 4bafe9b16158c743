//! Scattering model of the coupled cavity-dot reflectivity: bare and
//! dressed propagators, polarization-resolved reflection amplitudes, and
//! the differential signal ΔR obtained by subtracting the response without
//! the charged dot.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::CavityDotParams;
use crate::spectrum::{ComplexResponse, Spectrum, SpectrumMeta};

/// Bare propagator 1/(ω − ω₀ + iΓ), μeV⁻¹.
pub fn bare_green(omega: f64, omega_0: f64, gamma: f64) -> Result<C64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma", "half-width must be > 0 (pole on real axis)"));
    }
    Ok(C64::new(1.0, 0.0) / C64::new(omega - omega_0, gamma))
}

/// Cavity propagator dressed by the dot to all orders in the coupling:
/// 1/(ω − ω_C + iΓ_C − |g_C|²/(ω − ω_D + iΓ_D)).
pub fn dressed_green_cavity(omega: f64, p: &CavityDotParams) -> C64 {
    let self_energy = p.g_c * p.g_c / C64::new(omega - p.omega_d, p.gamma_d);
    C64::new(1.0, 0.0) / (C64::new(omega - p.omega_c, p.gamma_c) - self_energy)
}

/// Dot propagator with the roles swapped:
/// 1/(ω − ω_D + iΓ_D − |g_C|²/(ω − ω_C + iΓ_C)).
pub fn dressed_green_dot(omega: f64, p: &CavityDotParams) -> C64 {
    let self_energy = p.g_c * p.g_c / C64::new(omega - p.omega_c, p.gamma_c);
    C64::new(1.0, 0.0) / (C64::new(omega - p.omega_d, p.gamma_d) - self_energy)
}

/// The two complex poles shared by both dressed propagators: roots of
/// (ω − ω_C + iΓ_C)(ω − ω_D + iΓ_D) = |g_C|², via the quadratic formula.
pub fn dressed_poles(p: &CavityDotParams) -> (C64, C64) {
    let z_c = C64::new(p.omega_c, -p.gamma_c);
    let z_d = C64::new(p.omega_d, -p.gamma_d);
    let half_sum = (z_c + z_d) / 2.0;
    let half_diff = (z_c - z_d) / 2.0;
    let root = (half_diff * half_diff + C64::new(p.g_c * p.g_c, 0.0)).sqrt();
    (half_sum + root, half_sum - root)
}

/// Vertical-polarization reflection amplitude e^{iφ} + G_C(ω)·bg_scale.
pub fn amplitude_v(omega: f64, p: &CavityDotParams) -> C64 {
    C64::from_polar(1.0, p.phi) + dressed_green_cavity(omega, p) * p.bg_scale
}

/// Dressed cavity response sampled over a grid.
pub fn cavity_response(grid: &[f64], p: &CavityDotParams) -> Result<ComplexResponse> {
    let values = grid.iter().map(|&w| dressed_green_cavity(w, p)).collect();
    ComplexResponse::new(grid.to_vec(), values)
}

/// Exact differential V-polarization signal:
/// |e^{iφ} + G_C(ω)·bg|² − |e^{iφ} + G_C⁰(ω + δω)·bg|²,
/// where the reference propagator is the bare cavity shifted by the
/// bias-induced δω.
pub fn delta_r_v_exact(grid: &[f64], p: &CavityDotParams) -> Result<Spectrum> {
    let phase = C64::from_polar(1.0, p.phi);
    let values = grid
        .iter()
        .map(|&w| {
            let charged = phase + dressed_green_cavity(w, p) * p.bg_scale;
            let reference = phase
                + bare_green(w + p.delta_omega, p.omega_c, p.gamma_c)
                    .expect("gamma_c validated")
                    * p.bg_scale;
            charged.norm_sqr() - reference.norm_sqr()
        })
        .collect();
    Spectrum::new(grid.to_vec(), values, meta_v())
}

/// Unscaled pieces of the truncated differential model: the leading-order
/// term in the inverse background amplitude and the first-order δω
/// coefficient,
///
///   ΔR_V ∝ dr0 + δω·dr1,
///   dr0(ω) = Re[e^{−iφ}(G_C(ω) − G_C⁰(ω))],
///   dr1(ω) = Re[e^{−iφ}(G_C⁰(ω))²].
pub fn expanded_parts(
    omega: f64,
    g_c: f64,
    gamma_c: f64,
    gamma_d: f64,
    omega_c: f64,
    omega_d: f64,
    phi: f64,
) -> (f64, f64) {
    let conj_phase = C64::from_polar(1.0, -phi);
    let bare = C64::new(1.0, 0.0) / C64::new(omega - omega_c, gamma_c);
    let self_energy = g_c * g_c / C64::new(omega - omega_d, gamma_d);
    let dressed = C64::new(1.0, 0.0) / (C64::new(omega - omega_c, gamma_c) - self_energy);
    let dr0 = (conj_phase * (dressed - bare)).re;
    let dr1 = (conj_phase * bare * bare).re;
    (dr0, dr1)
}

/// Truncated differential V-polarization signal, the model used for
/// fitting: 2·bg_scale·(dr0 + δω·dr1). Agrees with [`delta_r_v_exact`] to
/// first order in δω and leading order in the background scale.
pub fn delta_r_v_expanded(grid: &[f64], p: &CavityDotParams) -> Result<Spectrum> {
    let values = grid
        .iter()
        .map(|&w| {
            let (dr0, dr1) =
                expanded_parts(w, p.g_c, p.gamma_c, p.gamma_d, p.omega_c, p.omega_d, p.phi);
            2.0 * p.bg_scale * (dr0 + p.delta_omega * dr1)
        })
        .collect();
    Spectrum::new(grid.to_vec(), values, meta_v())
}

/// Differential H-polarization signal. Horizontally polarized light couples
/// only to the dot directly, so the charged amplitude is
/// e^{iφ} + g_direct·G_D(ω) with the dressed dot propagator, and the
/// uncharged reference is the pure background phase. `g_direct` bundles the
/// direct dot-field coupling and the inverse background amplitude into one
/// dimensionless scale, the H-polarization analogue of `bg_scale`.
pub fn delta_r_h(grid: &[f64], p: &CavityDotParams, g_direct: f64) -> Result<Spectrum> {
    if g_direct < 0.0 {
        return Err(Error::invalid("g_direct", "coupling scale must be ≥ 0"));
    }
    let phase = C64::from_polar(1.0, p.phi);
    let values = grid
        .iter()
        .map(|&w| {
            let charged = phase + dressed_green_dot(w, p) * g_direct;
            charged.norm_sqr() - 1.0
        })
        .collect();
    Spectrum::new(
        grid.to_vec(),
        values,
        SpectrumMeta {
            polarization: Some(crate::spectrum::MeasPolarization::H),
            ..Default::default()
        },
    )
}

/// Purcell-factor estimate Γ′/Γ₀ with Γ′ = g_C²/Γ_C the on-resonance
/// emission rate into the cavity mode.
pub fn purcell_estimate(p: &CavityDotParams) -> f64 {
    p.g_c * p.g_c / (p.gamma_c * p.gamma_0)
}

/// Full width at half maximum of the dressed dot amplitude response
/// |G_D(ω)| around its maximum, found by bisection on each side. The
/// differential signal is first order in G_D, so this amplitude-response
/// width is the width the dot feature displays in ΔR.
pub fn effective_dot_linewidth(p: &CavityDotParams) -> f64 {
    let modulus = |w: f64| dressed_green_dot(w, p).norm();
    // Locate the peak near ω_D by golden-section refinement of a coarse scan.
    let span = 12.0 * p.gamma_d + 4.0 * p.g_c;
    let mut peak_w = p.omega_d;
    let mut peak = modulus(peak_w);
    let n = 4001;
    for k in 0..n {
        let w = p.omega_d - span + 2.0 * span * k as f64 / (n - 1) as f64;
        let m = modulus(w);
        if m > peak {
            peak = m;
            peak_w = w;
        }
    }
    let half = peak / 2.0;
    let crossing = |mut lo: f64, mut hi: f64| {
        // Bisection on modulus(w) − half; lo is above half, hi below.
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if modulus(mid) > half {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    // Walk outwards until the modulus falls below half on each side.
    let mut right = peak_w + p.gamma_d;
    while modulus(right) > half {
        right += p.gamma_d;
    }
    let mut left = peak_w - p.gamma_d;
    while modulus(left) > half {
        left -= p.gamma_d;
    }
    crossing(peak_w, right) - crossing(peak_w, left)
}

fn meta_v() -> SpectrumMeta {
    SpectrumMeta {
        polarization: Some(crate::spectrum::MeasPolarization::V),
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn published() -> CavityDotParams {
        CavityDotParams {
            omega_c: 1_302_130.0,
            omega_d: 1_301_940.0,
            gamma_c: 172.0,
            gamma_d: 5.2,
            g_c: 24.9,
            phi: 1.13,
            bg_scale: 0.5,
            delta_omega: 15.0,
            gamma_0: 0.5,
        }
    }

    /// Oracle: complex reciprocal by explicit conjugate-over-modulus.
    fn recip_oracle(re: f64, im: f64) -> C64 {
        let d = re * re + im * im;
        C64::new(re / d, -im / d)
    }

    /// Oracle: complex square root through polar form.
    fn sqrt_oracle(z: C64) -> C64 {
        C64::from_polar(z.norm().sqrt(), z.arg() / 2.0)
    }

    #[test]
    fn bare_green_on_resonance() {
        let g = bare_green(10.0, 10.0, 4.0).unwrap();
        assert!((g - C64::new(0.0, -0.25)).norm() < 1e-15);
    }

    #[test]
    fn bare_green_at_45_degrees() {
        let gamma = 3.0;
        let g = bare_green(gamma, 0.0, gamma).unwrap();
        assert!((g - C64::new(1.0 / (2.0 * gamma), -1.0 / (2.0 * gamma))).norm() < 1e-15);
    }

    #[test]
    fn bare_green_complex_division() {
        // ω₀ = 1301940, Γ = 5.2, ω = 1301950: oracle is manual conjugate
        // division, (10 − 5.2i)/(10² + 5.2²).
        let expect = recip_oracle(10.0, 5.2);
        let g = bare_green(1_301_950.0, 1_301_940.0, 5.2).unwrap();
        assert!((g - expect).norm() < 1e-15);
        assert!((g.re - 0.078_715_365).abs() < 1e-9);
        assert!((g.im + 0.040_931_990).abs() < 1e-9);
    }

    #[test]
    fn bare_green_rejects_nonpositive_width() {
        assert!(bare_green(1.0, 0.0, 0.0).is_err());
        assert!(bare_green(1.0, 0.0, -2.0).is_err());
    }

    #[test]
    fn dressed_reduces_to_bare_when_decoupled() {
        let mut p = published();
        p.g_c = 0.0;
        for w in [p.omega_d - 50.0, p.omega_d, p.omega_c, p.omega_c + 300.0] {
            let gc = dressed_green_cavity(w, &p);
            let gd = dressed_green_dot(w, &p);
            assert!((gc - bare_green(w, p.omega_c, p.gamma_c).unwrap()).norm() < 1e-15);
            assert!((gd - bare_green(w, p.omega_d, p.gamma_d).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn poles_match_quadratic_oracle() {
        // Oracle: quadratic roots of (ω−z_C)(ω−z_D) − g² with the square
        // root taken through polar form.
        let p = published();
        let z_c = C64::new(p.omega_c, -p.gamma_c);
        let z_d = C64::new(p.omega_d, -p.gamma_d);
        let disc = (z_c - z_d) * (z_c - z_d) + 4.0 * p.g_c * p.g_c;
        let root = sqrt_oracle(disc);
        let expect_hi = (z_c + z_d + root) / 2.0;
        let expect_lo = (z_c + z_d - root) / 2.0;
        let (hi, lo) = dressed_poles(&p);
        assert!((hi - expect_hi).norm() < 1e-9);
        assert!((lo - expect_lo).norm() < 1e-9);
        // Both roots annihilate the shared denominator.
        for pole in [hi, lo] {
            let den = (pole - z_c) * (pole - z_d) - p.g_c * p.g_c;
            assert!(den.norm() < 1e-6 * (p.omega_c * p.omega_c));
        }
        // Vieta: sum and product.
        assert!(((hi + lo) - (z_c + z_d)).norm() < 1e-9);
        assert!(((hi * lo) - (z_c * z_d - p.g_c * p.g_c)).norm() < 1e-3);
    }

    #[test]
    fn resonant_pole_widths() {
        // ω_C = ω_D with published widths: the weak-coupling regime since
        // (Γ_C − Γ_D)/2 = 83.4 > g_C = 24.9; imaginary parts from the
        // quadratic oracle.
        let mut p = published();
        p.omega_c = p.omega_d;
        let (a, b) = dressed_poles(&p);
        let mut ims = [a.im, b.im];
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 168.197).abs() < 5e-2);
        assert!((ims[1] + 9.003).abs() < 5e-2);
        assert!((p.gamma_c - p.gamma_d) / 2.0 > p.g_c);
    }

    #[test]
    fn poles_in_lower_half_plane() {
        let p = published();
        let (a, b) = dressed_poles(&p);
        assert!(a.im < 0.0);
        assert!(b.im < 0.0);
    }

    #[test]
    fn amplitude_v_limits() {
        let mut p = published();
        p.bg_scale = 0.0;
        let a = amplitude_v(p.omega_c, &p);
        assert!((a.norm() - 1.0).abs() < 1e-15);
        assert!((a - C64::from_polar(1.0, p.phi)).norm() < 1e-15);

        let p = published();
        let far = amplitude_v(p.omega_c + 1.0e7, &p);
        assert!((far - C64::from_polar(1.0, p.phi)).norm() < 1e-4);
    }

    #[test]
    fn delta_r_v_zero_when_inactive() {
        let mut p = published();
        p.g_c = 0.0;
        p.delta_omega = 0.0;
        let grid = crate::spectrum::linspace(p.omega_d - 400.0, p.omega_c + 400.0, 301);
        let exact = delta_r_v_exact(&grid, &p).unwrap();
        let expanded = delta_r_v_expanded(&grid, &p).unwrap();
        for (&e, &x) in exact.values.iter().zip(&expanded.values) {
            assert!(e.abs() < 1e-14);
            assert!(x.abs() < 1e-14);
        }
    }

    #[test]
    fn decoupled_shift_gives_derivative_lineshape() {
        // g_C = 0 with δω ≠ 0: the expanded signal is proportional to the
        // derivative of the bare cavity line.
        let mut p = published();
        p.g_c = 0.0;
        p.delta_omega = 4.0;
        let grid = crate::spectrum::linspace(p.omega_c - 900.0, p.omega_c + 900.0, 1201);
        let expanded = delta_r_v_expanded(&grid, &p).unwrap();
        let conj_phase = C64::from_polar(1.0, -p.phi);
        for (&w, &v) in grid.iter().zip(&expanded.values) {
            let g0 = bare_green(w, p.omega_c, p.gamma_c).unwrap();
            // d/dω |...|² term: −2 bg δω Re[e^{−iφ} dG⁰/dω], dG⁰/dω = −(G⁰)².
            let derivative = -2.0 * p.bg_scale * p.delta_omega * (conj_phase * (-g0 * g0)).re;
            assert!((v - derivative).abs() < 1e-12);
        }
    }

    #[test]
    fn expanded_matches_exact_to_second_order_in_shift() {
        // With a small background scale the inverse-background truncation
        // error is negligible and the residual exact-vs-expanded
        // discrepancy is quadratic in δω: halving δω shrinks it ≥ 3.5×.
        let mut p = published();
        p.bg_scale = 0.02;
        p.delta_omega = 16.0;
        let grid = crate::spectrum::linspace(p.omega_d - 500.0, p.omega_c + 700.0, 1601);
        let discrepancy = |p: &CavityDotParams| {
            let exact = delta_r_v_exact(&grid, p).unwrap();
            let expanded = delta_r_v_expanded(&grid, p).unwrap();
            exact
                .values
                .iter()
                .zip(&expanded.values)
                .map(|(e, x)| (e - x).abs())
                .fold(0.0f64, f64::max)
        };
        let full = discrepancy(&p);
        p.delta_omega /= 2.0;
        let halved = discrepancy(&p);
        assert!(
            full / halved >= 3.5,
            "quadratic remainder violated: {full:.3e} vs {halved:.3e}"
        );
    }

    #[test]
    fn expanded_zero_crossings_near_both_resonances() {
        // The fit model crosses zero once near the dot and once near the
        // cavity; verified by a dense-grid bisection oracle.
        let p = published();
        let tight = |lo: f64, hi: f64| {
            let n = 20_001usize;
            let f = |w: f64| {
                let (d0, d1) =
                    expanded_parts(w, p.g_c, p.gamma_c, p.gamma_d, p.omega_c, p.omega_d, p.phi);
                d0 + p.delta_omega * d1
            };
            let mut roots = Vec::new();
            let step = (hi - lo) / (n - 1) as f64;
            for k in 0..n - 1 {
                let a = lo + k as f64 * step;
                let b = a + step;
                if f(a) * f(b) < 0.0 {
                    let (mut xa, mut xb) = (a, b);
                    for _ in 0..80 {
                        let m = 0.5 * (xa + xb);
                        if f(xa) * f(m) <= 0.0 {
                            xb = m;
                        } else {
                            xa = m;
                        }
                    }
                    roots.push(0.5 * (xa + xb));
                }
            }
            roots
        };
        let dot_roots = tight(p.omega_d - 30.0, p.omega_d + 30.0);
        assert_eq!(dot_roots.len(), 1, "dot window roots: {dot_roots:?}");
        let cav_roots = tight(p.omega_c - 130.0, p.omega_c + 60.0);
        assert_eq!(cav_roots.len(), 1, "cavity window roots: {cav_roots:?}");
        // Both crossings sit off the underlying resonances.
        assert!((dot_roots[0] - p.omega_d).abs() > 1.0);
        assert!((cav_roots[0] - p.omega_c).abs() > 1.0);
    }

    #[test]
    fn h_polarization_scales() {
        let mut p = published();
        p.delta_omega = 0.0;
        let grid = crate::spectrum::linspace(p.omega_d - 400.0, p.omega_c + 400.0, 2001);

        let zero = delta_r_h(&grid, &p, 0.0).unwrap();
        assert!(zero.values.iter().all(|v| v.abs() < 1e-15));

        // Weak direct coupling: the H feature is far below the V feature.
        let h = delta_r_h(&grid, &p, 5e-5).unwrap();
        let v = delta_r_v_exact(&grid, &p).unwrap();
        let (_, h_peak) = h.peak_abs();
        let (_, v_peak) = v.peak_abs();
        assert!(
            v_peak > 10.0 * h_peak,
            "V peak {v_peak:.3e} should dominate H peak {h_peak:.3e}"
        );

        // The H lineshape is centered near the dot resonance with a width
        // set by the dressed dot pole: peak-finder oracle.
        let (idx, _) = h.peak_abs();
        let (_, lo_pole) = dressed_poles(&p);
        assert!((h.grid[idx] - lo_pole.re).abs() < 4.0 * p.gamma_d + p.g_c);
    }

    #[test]
    fn purcell_published_value() {
        let p = published();
        let f = purcell_estimate(&p);
        assert!((f - 24.9 * 24.9 / (172.0 * 0.5)).abs() < 1e-12);
        assert!((f - 7.21).abs() < 0.01);

        let mut p0 = p;
        p0.g_c = 0.0;
        assert_eq!(purcell_estimate(&p0), 0.0);

        let mut p2 = p;
        p2.g_c = 2.0 * p.g_c;
        assert!((purcell_estimate(&p2) - 4.0 * f).abs() < 1e-9);
    }

    #[test]
    fn dot_linewidth_broadens_under_dressing() {
        let p = published();
        let dressed = effective_dot_linewidth(&p);
        let mut bare = p;
        bare.g_c = 0.0;
        let undressed = effective_dot_linewidth(&bare);
        assert!(
            dressed > undressed,
            "dressing must broaden the dot response: {dressed:.2} vs {undressed:.2}"
        );
    }

    proptest! {
        #[test]
        fn poles_shared_and_passive(
            split in -600.0..600.0f64,
            g in 0.0..60.0f64,
        ) {
            let mut p = published();
            p.omega_c = p.omega_d + split;
            p.g_c = g;
            let (hi, lo) = dressed_poles(&p);
            prop_assert!(hi.im < 0.0 && lo.im < 0.0);
            // Both dressed propagators blow up at the same poles: evaluate
            // the shared denominator.
            for pole in [hi, lo] {
                let den = (pole - C64::new(p.omega_c, -p.gamma_c))
                    * (pole - C64::new(p.omega_d, -p.gamma_d))
                    - p.g_c * p.g_c;
                prop_assert!(den.norm() < 1e-6 * p.omega_c);
            }
        }

        #[test]
        fn mirror_symmetry_of_denominator(
            offset in -400.0..400.0f64,
            g in 0.1..50.0f64,
        ) {
            // The shared denominator is invariant under the full
            // cavity<->dot parameter swap, and reflecting ω about the
            // midpoint while swapping only the widths conjugate-mirrors it.
            let mut p = published();
            p.g_c = g;
            let mid = (p.omega_c + p.omega_d) / 2.0;
            let w = mid + offset;

            let mut full_swap = p;
            std::mem::swap(&mut full_swap.omega_c, &mut full_swap.omega_d);
            std::mem::swap(&mut full_swap.gamma_c, &mut full_swap.gamma_d);
            let a = dressed_green_cavity(w, &full_swap);
            let b = dressed_green_dot(w, &p);
            prop_assert!((a - b).norm() < 1e-12 * b.norm().max(1e-30));

            let mut width_swap = p;
            std::mem::swap(&mut width_swap.gamma_c, &mut width_swap.gamma_d);
            let mirrored = dressed_green_cavity(2.0 * mid - w, &width_swap);
            let original = dressed_green_dot(w, &p);
            prop_assert!(
                (mirrored + original.conj()).norm()
                    < 1e-12 * original.norm().max(1e-30)
            );
        }
    }
}
