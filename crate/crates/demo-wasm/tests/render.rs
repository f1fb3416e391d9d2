use fracfield_demo::{render_diffraction, render_fractional_wvd, render_frft_magnitude};

#[test]
fn diffraction_frame_matches_order_mapping() {
    let r = render_diffraction(64, 500.0, 31.25, 1.0, 0.5, false).unwrap();
    assert_eq!((r.width, r.height, r.gray.len()), (64, 64, 64 * 64));
    assert!((r.order - 0.5).abs() < 1e-12);
    assert!((r.scale - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(r.gray.iter().copied().fold(0.0, f64::max), 1.0);
    assert!(r.gray.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn log_display_stays_in_range() {
    let r = render_diffraction(32, 633.0, 5.0, 1.0, 0.3, true).unwrap();
    assert!(r.gray.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(render_diffraction(32, 633.0, -1.0, 1.0, 0.3, true).is_err());
}

#[test]
fn fourier_magnitude_hides_shift_and_flip() {
    let fourier = render_frft_magnitude(32, 1.0, 5, true).unwrap();
    assert!(fourier.change < 1e-10, "{}", fourier.change);
    let fractional = render_frft_magnitude(32, 0.5, 5, true).unwrap();
    assert!(fractional.change > 1e-2, "{}", fractional.change);
    assert_eq!(render_frft_magnitude(32, 0.5, 0, false).unwrap().change, 0.0);
}

#[test]
fn wvd_frame_shape_and_rejection() {
    let r = render_fractional_wvd(64, 1.0, 0.3).unwrap();
    assert_eq!(r.gray.len(), 64 * 64);
    assert!(r.gray.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(render_fractional_wvd(64, 0.0, 0.3).is_err());
}
