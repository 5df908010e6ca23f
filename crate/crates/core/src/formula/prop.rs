//! Atomic propositions: gadget atoms with structured indices and free user atoms.

use std::fmt;

/// Gadget families in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// r_{i,ℓ}: simulation states.
    R,
    A,
    /// ā_{i,ℓ}
    Abar,
    B,
    C,
    D,
    /// Upper-case families A_i .. R_i and K carry no label.
    CapA,
    CapB,
    CapC,
    CapD,
    CapE,
    CapR,
    K,
}

impl Family {
    pub const LABELLED: [Family; 6] = [Family::R, Family::A, Family::Abar, Family::B, Family::C, Family::D];
    pub const PHASED: [Family; 6] =
        [Family::CapA, Family::CapB, Family::CapC, Family::CapD, Family::CapE, Family::CapR];

    pub fn is_labelled(self) -> bool {
        matches!(self, Family::R | Family::A | Family::Abar | Family::B | Family::C | Family::D)
    }

    pub fn is_phased(self) -> bool {
        self != Family::K
    }

    fn stem(self) -> &'static str {
        match self {
            Family::R => "r",
            Family::A => "a",
            Family::Abar => "abar",
            Family::B => "b",
            Family::C => "c",
            Family::D => "d",
            Family::CapA => "Acap",
            Family::CapB => "Bcap",
            Family::CapC => "Ccap",
            Family::CapD => "Dcap",
            Family::CapE => "Ecap",
            Family::CapR => "Rcap",
            Family::K => "K",
        }
    }

    fn from_stem(s: &str) -> Option<Family> {
        Some(match s {
            "r" => Family::R,
            "a" => Family::A,
            "abar" => Family::Abar,
            "b" => Family::B,
            "c" => Family::C,
            "d" => Family::D,
            "Acap" => Family::CapA,
            "Bcap" => Family::CapB,
            "Ccap" => Family::CapC,
            "Dcap" => Family::CapD,
            "Ecap" => Family::CapE,
            "Rcap" => Family::CapR,
            "K" => Family::K,
            _ => return None,
        })
    }
}

/// A gadget atom. Unused indices are 0 (phase for K, label for upper-case families).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gadget {
    pub family: Family,
    pub copy: u8,
    pub phase: u8,
    pub label: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Proposition {
    Gadget(Gadget),
    User(String),
}

impl Proposition {
    /// Lower-case family atom x^copy_{phase,label}.
    pub fn labelled(family: Family, copy: u8, phase: u8, label: u32) -> Proposition {
        debug_assert!(family.is_labelled() && phase <= 2 && label >= 1 && (1..=2).contains(&copy));
        Proposition::Gadget(Gadget { family, copy, phase, label })
    }

    /// Upper-case family atom X^copy_phase.
    pub fn phased(family: Family, copy: u8, phase: u8) -> Proposition {
        debug_assert!(!family.is_labelled() && family != Family::K && phase <= 2);
        Proposition::Gadget(Gadget { family, copy, phase, label: 0 })
    }

    pub fn k(copy: u8) -> Proposition {
        Proposition::Gadget(Gadget { family: Family::K, copy, phase: 0, label: 0 })
    }

    pub fn user(name: impl Into<String>) -> Proposition {
        Proposition::User(name.into())
    }

    pub fn gadget(&self) -> Option<&Gadget> {
        match self {
            Proposition::Gadget(g) => Some(g),
            Proposition::User(_) => None,
        }
    }

    pub fn copy(&self) -> Option<u8> {
        self.gadget().map(|g| g.copy)
    }

    pub fn family(&self) -> Option<Family> {
        self.gadget().map(|g| g.family)
    }

    /// Parses the printed name of an atom. Names shaped like gadget atoms must have
    /// in-range indices; anything else is a user atom.
    pub fn from_name(name: &str) -> Result<Proposition, String> {
        match parse_gadget(name) {
            Some(Ok(g)) => Ok(Proposition::Gadget(g)),
            Some(Err(e)) => Err(e),
            None => Ok(Proposition::User(name.to_string())),
        }
    }
}

fn parse_gadget(name: &str) -> Option<Result<Gadget, String>> {
    let split = name.find(|c: char| c.is_ascii_digit())?;
    let family = Family::from_stem(&name[..split])?;
    let parts: Vec<&str> = name[split..].split('_').collect();
    if parts.iter().any(|p| p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit())) {
        return None;
    }
    let expected = if family.is_labelled() {
        3
    } else if family.is_phased() {
        2
    } else {
        1
    };
    if parts.len() != expected {
        return None;
    }
    let nums: Vec<u64> = match parts.iter().map(|p| p.parse::<u64>()).collect() {
        Ok(v) => v,
        Err(_) => return Some(Err(format!("index overflow in `{name}`"))),
    };
    let copy = nums[0];
    if !(1..=2).contains(&copy) {
        return Some(Err(format!("copy index of `{name}` must be 1 or 2")));
    }
    let phase = if expected >= 2 { nums[1] } else { 0 };
    if phase > 2 {
        return Some(Err(format!("phase index of `{name}` must be at most 2")));
    }
    let label = if expected == 3 { nums[2] } else { 0 };
    if expected == 3 && (label == 0 || label > u32::MAX as u64) {
        return Some(Err(format!("label index of `{name}` out of range")));
    }
    Some(Ok(Gadget { family, copy: copy as u8, phase: phase as u8, label: label as u32 }))
}

impl fmt::Display for Gadget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stem = self.family.stem();
        if self.family.is_labelled() {
            write!(f, "{stem}{}_{}_{}", self.copy, self.phase, self.label)
        } else if self.family.is_phased() {
            write!(f, "{stem}{}_{}", self.copy, self.phase)
        } else {
            write!(f, "{stem}{}", self.copy)
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proposition::Gadget(g) => g.fmt(f),
            Proposition::User(s) => f.write_str(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let r = Proposition::labelled(Family::R, 1, 0, 3);
        assert_eq!(r.to_string(), "r1_0_3");
        let a = Proposition::phased(Family::CapA, 2, 1);
        assert_eq!(a.to_string(), "Acap2_1");
        assert_eq!(Proposition::k(1).to_string(), "K1");
        let ab = Proposition::labelled(Family::Abar, 2, 2, 1);
        assert_eq!(ab.to_string(), "abar2_2_1");
        for p in [r, a, Proposition::k(1), ab, Proposition::user("busy")] {
            assert_eq!(Proposition::from_name(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn out_of_range_gadget_names() {
        assert!(Proposition::from_name("r3_0_1").is_err());
        assert!(Proposition::from_name("r1_3_1").is_err());
        assert!(Proposition::from_name("r1_0_0").is_err());
        assert_eq!(Proposition::from_name("r1_0").unwrap(), Proposition::user("r1_0"));
        assert_eq!(Proposition::from_name("Kx").unwrap(), Proposition::user("Kx"));
    }

    #[test]
    fn canonical_order_is_family_copy_phase_label() {
        let mut v = [
            Proposition::k(1),
            Proposition::phased(Family::CapA, 1, 0),
            Proposition::labelled(Family::R, 2, 0, 1),
            Proposition::labelled(Family::R, 1, 1, 1),
            Proposition::labelled(Family::R, 1, 0, 2),
            Proposition::labelled(Family::A, 1, 0, 1),
        ];
        v.sort();
        let names: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["r1_0_2", "r1_1_1", "r2_0_1", "a1_0_1", "Acap1_0", "K1"]);
    }
}
