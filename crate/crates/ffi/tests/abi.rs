use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use slabwalk_ffi::*;

struct Handle(*mut SwGraph);

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { sw_graph_free(self.0) }
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sw_last_error()) }.to_string_lossy().into_owned()
}

fn lattice(d: usize, r: i64) -> Handle {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sw_graph_lattice(d, r, &mut g) }, SwStatus::Ok);
    Handle(g)
}

#[test]
fn lazy_return_on_the_line() {
    let g = lattice(1, 10);
    assert_eq!(unsafe { sw_graph_vertex_count(g.0) }, 21);
    let mut buf = [0.0; 4];
    assert_eq!(unsafe { sw_heat_kernel_diag(g.0, 10, 3, 1, 0, buf.as_mut_ptr(), buf.len()) }, SwStatus::Ok);
    assert_eq!(buf, [1.0, 0.5, 0.375, 0.3125]);
    let mut f = [0.0; 4];
    assert_eq!(unsafe { sw_first_return(g.0, 10, 3, f.as_mut_ptr(), f.len()) }, SwStatus::Ok);
    assert_eq!(f[1], 0.5);
    assert!((f[2] - 0.125).abs() < 1e-15);
}

#[test]
fn buffer_and_horizon_guards() {
    let g = lattice(2, 3);
    let mut x = 0;
    let mut y = 0;
    assert_eq!(unsafe { sw_graph_markers(g.0, &mut x, &mut y) }, SwStatus::Ok);
    assert_eq!(y, usize::MAX);
    let mut h = 0;
    assert_eq!(unsafe { sw_exact_horizon(g.0, x, &mut h) }, SwStatus::Ok);
    assert_eq!(h, 3);
    let mut buf = [0.0; 5];
    assert_eq!(unsafe { sw_heat_kernel_diag(g.0, x, 5, 1, 0, buf.as_mut_ptr(), 5) }, SwStatus::BufferTooSmall);
    assert!(last_error().contains("need 6"));
    let mut buf = [0.0; 6];
    assert_eq!(unsafe { sw_heat_kernel_diag(g.0, x, 5, 1, 0, buf.as_mut_ptr(), 6) }, SwStatus::HorizonShortfall);
    assert_eq!(unsafe { sw_heat_kernel_diag(g.0, x, 5, 1, 1, buf.as_mut_ptr(), 6) }, SwStatus::Ok);
    assert_eq!(unsafe { sw_heat_kernel_diag(g.0, 999, 2, 1, 0, buf.as_mut_ptr(), 6) }, SwStatus::InvalidArgument);
}

#[test]
fn glued_halves_and_ratio() {
    let periods = [2u64, 12];
    let mut halves = [ptr::null_mut(), ptr::null_mut()];
    for (parity, slot) in halves.iter_mut().enumerate() {
        let status = unsafe { sw_graph_half(2, 1, periods.as_ptr(), 2, parity as u32, 0, 21, slot) };
        assert_eq!(status, SwStatus::Ok, "{}", last_error());
    }
    let (he, ho) = (Handle(halves[0]), Handle(halves[1]));
    let mut glued = ptr::null_mut();
    assert_eq!(unsafe { sw_graph_glue(he.0, ho.0, 0.25, 0, &mut glued) }, SwStatus::Ok);
    let glued = Handle(glued);
    let n = unsafe { sw_graph_vertex_count(he.0) + sw_graph_vertex_count(ho.0) };
    assert_eq!(unsafe { sw_graph_vertex_count(glued.0) }, n);
    let mut ratio = [0.0; 21];
    assert_eq!(unsafe { sw_ratio(glued.0, 20, 0, ratio.as_mut_ptr(), 21) }, SwStatus::Ok);
    assert_eq!(&ratio[..4], &[1.0; 4]);
    assert!(ratio[20] > 1.0);
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { sw_graph_glue(he.0, ho.0, 1.5, 0, &mut bad) }, SwStatus::InvalidArgument);
    assert!(bad.is_null());
    assert_eq!(unsafe { sw_graph_half(2, 1, periods.as_ptr(), 2, 2, 0, 5, &mut bad) }, SwStatus::InvalidArgument);
    let odd_period = [2u64, 13];
    assert_eq!(unsafe { sw_graph_half(2, 1, odd_period.as_ptr(), 2, 0, 0, 5, &mut bad) }, SwStatus::InvalidArgument);
}

#[test]
fn escape_from_a_plane_box_has_vacuous_lower_bound() {
    let g = lattice(2, 30);
    let mut e = SwEscape::default();
    // Vertex 0 is a corner of the box, so its horizon is 0.
    assert_eq!(unsafe { sw_escape_prob(g.0, 0, 30, 2, &mut e) }, SwStatus::HorizonShortfall);
    let mut x = 0;
    let mut y = 0;
    unsafe { sw_graph_markers(g.0, &mut x, &mut y) };
    assert_eq!(unsafe { sw_escape_prob(g.0, x, 30, 2, &mut e) }, SwStatus::Ok);
    assert_eq!(e.lower, 0.0);
    assert_eq!(e.horizon_too_small, 1);
    assert!(e.upper > 0.0 && e.upper < 0.5);
}

#[test]
fn box_guard_is_a_resource_limit() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sw_graph_lattice(22, 101, &mut g) }, SwStatus::ResourceLimit);
    assert!(g.is_null());
}

#[test]
fn scalar_helpers() {
    let mut a = 0;
    for (gamma, prev, want) in [(1, 2, 12), (2, 2, 44), (1, 12, 72)] {
        assert_eq!(unsafe { sw_next_scale(gamma, prev, &mut a) }, SwStatus::Ok);
        assert_eq!(a, want);
    }
    let mut c = 0;
    assert_eq!(unsafe { sw_centered_mod(-2, 4, &mut c) }, SwStatus::Ok);
    assert_eq!(c, 2);
}

/// The generated header must compile as both C and C++.
#[test]
fn header_compiles() {
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let src = std::env::temp_dir().join(format!("slabwalk_header_{}.c", std::process::id()));
    std::fs::write(&src, "#include \"slabwalk.h\"\nint main(void) { return sw_version() == 0; }\n").unwrap();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = Command::new(compiler).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I", include]).arg(&src).output()
        else {
            eprintln!("{compiler} not found; skipping");
            continue;
        };
        assert!(out.status.success(), "{compiler}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let _ = std::fs::remove_file(src);
}
