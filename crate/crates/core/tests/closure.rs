use mfx_core::fluct::analyze_series;
use mfx_core::synth::{cascade_hurst, gen_cascade, gen_coupled_pair, gen_fgn};
use mfx_core::{
    analyze_pair, default_scale_grid, generalized_hurst, rho_q, shift_pair, LagSpec, Leader,
    ProcessKind, QGrid, Series,
};

#[test]
fn fgn_hurst_recovered() {
    let qgrid = QGrid::new(vec![2.0]).unwrap();
    for h in [0.3, 0.5, 0.8] {
        let mut sum = 0.0;
        for seed in 0..4 {
            let x = gen_fgn(h, 1 << 14, seed).unwrap();
            let grid = default_scale_grid(x.len(), 2).unwrap();
            let f = analyze_series(&x, &grid, &qgrid, 2).unwrap();
            sum += generalized_hurst(&f, (grid.min(), grid.max()))
                .unwrap()
                .exponent(0)
                .unwrap();
        }
        assert!(
            (sum / 4.0 - h).abs() <= 0.06,
            "H={h}: mean h(2)={}",
            sum / 4.0
        );
    }
}

#[test]
fn cascade_spectrum_recovered_and_decreasing() {
    let a = 0.7;
    let x = gen_cascade(a, 14, 0).unwrap();
    let grid = default_scale_grid(x.len(), 2).unwrap();
    let qs = [1.0, 2.0, 3.0, 4.0];
    let f = analyze_series(&x, &grid, &QGrid::new(qs.to_vec()).unwrap(), 2).unwrap();
    let fit = generalized_hurst(&f, (grid.min(), grid.max())).unwrap();
    let hs: Vec<f64> = (0..qs.len()).map(|i| fit.exponent(i).unwrap()).collect();
    for (h, q) in hs.iter().zip(qs) {
        assert!((h - cascade_hurst(a, q)).abs() <= 0.12, "h({q})={h}");
    }
    assert!(hs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn lagged_copy_is_found_in_the_right_direction() {
    let len = 1 << 13;
    let z = gen_fgn(0.6, 2 * len, 7).unwrap();
    let x = Series::new(z.values()[4..4 + len].to_vec(), 10.0, 0).unwrap();
    let y = Series::new(z.values()[..len].to_vec(), 10.0, 0).unwrap();
    let qgrid = QGrid::new(vec![2.0]).unwrap();
    let rho2 = |leader| {
        let (a, b) = shift_pair(&x, &y, LagSpec::new(4, leader)).unwrap();
        let grid = default_scale_grid(a.len(), 2).unwrap();
        let p = analyze_pair(&a, &b, &grid, &qgrid, 2).unwrap();
        rho_q(&p.xy, &p.xx, &p.yy)
            .unwrap()
            .values
            .into_iter()
            .map(Option::unwrap)
            .collect::<Vec<_>>()
    };
    let (rx, ry) = (rho2(Leader::X), rho2(Leader::Y));
    assert!(rx.iter().all(|r| (r - 1.0).abs() < 1e-12));
    assert!(rx.iter().zip(&ry).all(|(a, b)| a > b));
}

#[test]
fn coupling_orders_rho() {
    let base = ProcessKind::Fgn { hurst: 0.7 };
    let qgrid = QGrid::new(vec![2.0]).unwrap();
    let median_rho = |w: f64| {
        let (x, y) = gen_coupled_pair(w, &base, 1 << 13, 3).unwrap();
        let grid = default_scale_grid(x.len(), 2).unwrap();
        let p = analyze_pair(&x, &y, &grid, &qgrid, 2).unwrap();
        let mut r: Vec<f64> = rho_q(&p.xy, &p.xx, &p.yy)
            .unwrap()
            .values
            .into_iter()
            .map(Option::unwrap)
            .collect();
        r.sort_by(f64::total_cmp);
        r[r.len() / 2]
    };
    let m: Vec<f64> = [0.1, 0.5, 0.9].into_iter().map(median_rho).collect();
    assert!(m[0] < m[1] && m[1] < m[2], "{m:?}");
    assert!((m[1] - 0.5).abs() < 0.1, "{m:?}");
}
