//! Experiment files shipped with the binary.

pub const PRESETS: &[(&str, &str)] = &[
    ("sa-anchor", include_str!("../presets/sa-anchor.toml")),
    ("fig3-ostsap", include_str!("../presets/fig3-ostsap.toml")),
    ("fig4-ostsap-latency", include_str!("../presets/fig4-ostsap-latency.toml")),
    ("fig7-sbaia", include_str!("../presets/fig7-sbaia.toml")),
    ("fig9-notaft", include_str!("../presets/fig9-notaft.toml")),
    ("csmud", include_str!("../presets/csmud.toml")),
    ("fig14-craplnc", include_str!("../presets/fig14-craplnc.toml")),
    ("fig16-ccra", include_str!("../presets/fig16-ccra.toml")),
    ("scf", include_str!("../presets/scf.toml")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}
