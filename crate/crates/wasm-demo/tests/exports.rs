use sierpinski_wasm_demo::{address_of_point, blowup_csv, distance, point_of_address, render_svg};

#[test]
fn render_counts_triangles() {
    let svg = render_svg(2, "#1f4e79").unwrap();
    assert_eq!(svg.matches("<path").count(), 9);
    assert!(svg.contains("fill=\"#1f4e79\""));
    assert!(render_svg(10, "black").is_err());
}

#[test]
fn click_to_address() {
    assert_eq!(address_of_point(0.0, 0.0, 4).unwrap(), "bbba:L");
    assert_eq!(
        address_of_point(0.5, 0.8660254037844386, 3).unwrap(),
        "aaa:T"
    );
    assert!(address_of_point(2.0, 0.0, 3).is_err());
}

#[test]
fn distances() {
    assert!(distance("a:T", "b:L")
        .unwrap()
        .starts_with("d_G = 1/2^0 = 1"));
    assert!(distance("aa:L", "aa:R")
        .unwrap()
        .starts_with("d_G = 1/2^2 = 0.25"));
    assert!(distance("a:T", "oops").is_err());
    assert_eq!(point_of_address("a:R").unwrap(), "0.75,0.4330127018922193");
}

#[test]
fn blowup_table() {
    let csv = blowup_csv(8, 3).unwrap();
    let ratios: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(ratios, ["4", "16", "64"]);
    assert!(blowup_csv(3, 3).unwrap_err().contains("j >= 4"));
}
