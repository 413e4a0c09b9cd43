//! The scenarios shipped inside the binary, one per canonical arrangement.

/// A scenario embedded at compile time.
#[derive(Debug, Clone, Copy)]
pub struct BundledScenario {
    pub name: &'static str,
    pub file_name: &'static str,
    pub text: &'static str,
}

pub const BUNDLED: &[BundledScenario] = &[
    BundledScenario {
        name: "fig1",
        file_name: "fig1.json",
        text: include_str!("../scenarios/fig1.json"),
    },
    BundledScenario {
        name: "fig2",
        file_name: "fig2.json",
        text: include_str!("../scenarios/fig2.json"),
    },
    BundledScenario {
        name: "fig2-boosted",
        file_name: "fig2-boosted.json",
        text: include_str!("../scenarios/fig2-boosted.json"),
    },
    BundledScenario {
        name: "fig3",
        file_name: "fig3.json",
        text: include_str!("../scenarios/fig3.json"),
    },
    BundledScenario {
        name: "nosignal",
        file_name: "nosignal.json",
        text: include_str!("../scenarios/nosignal.json"),
    },
];

/// Looks a bundled scenario up by name, with or without the `.json` suffix.
pub fn find(name: &str) -> Option<&'static BundledScenario> {
    BUNDLED
        .iter()
        .find(|b| b.name == name || b.file_name == name)
}
