use ftqc_threshold::CodeParametersF64;

/// A named parameter set shipped with the tool.
#[derive(Debug, Clone)]
pub struct CodeRegistryEntry {
    pub code: CodeParametersF64,
    pub provenance: &'static str,
}

pub fn builtin() -> Vec<CodeRegistryEntry> {
    vec![CodeRegistryEntry {
        code: CodeParametersF64::steane(),
        provenance:
            "[[7,1,3]] Steane code; c = C(7,2) = 21, encode depth 4, decode depth 10, delta = 2",
    }]
}

pub fn lookup(name: &str) -> Option<CodeRegistryEntry> {
    builtin()
        .into_iter()
        .find(|e| e.code.name.eq_ignore_ascii_case(name))
}
