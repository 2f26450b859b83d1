//! Scenario and sweep presets shipped with the crate.

pub const REFERENCE_SCENARIO: &str = include_str!("../../presets/paperV.cfg");
pub const FIG3: &str = include_str!("../../presets/fig3.sweep");
pub const FIG4: &str = include_str!("../../presets/fig4.sweep");
pub const FIG5: &str = include_str!("../../presets/fig5.sweep");

/// Looks a preset up by file name (`paperV.cfg`, `fig3.sweep`, …) or by
/// figure name (`fig3`).
pub fn get(name: &str) -> Option<&'static str> {
    match name {
        "paperV.cfg" | "paperV" => Some(REFERENCE_SCENARIO),
        "fig3.sweep" | "fig3" => Some(FIG3),
        "fig4.sweep" | "fig4" => Some(FIG4),
        "fig5.sweep" | "fig5" => Some(FIG5),
        _ => None,
    }
}
