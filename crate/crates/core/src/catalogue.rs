//! Built-in example groups.

use crate::error::{Error, Result};
use crate::ssgroup::GroupDef;

pub const ADDING_MACHINE: &str = "\
# binary odometer
alphabet: 2
a = (0 1)(e, a)
";

pub const BASILICA: &str = "\
alphabet: 2
a = (0 1)(e, b)
b = ()(e, a)
";

pub const GRIGORCHUK: &str = "\
alphabet: 2
a = (0 1)(e, e)
b = ()(a, c)
c = ()(a, d)
d = ()(e, b)
";

/// Not contracting; used as a negative example.
pub const LAMPLIGHTER: &str = "\
alphabet: 2
a = (0 1)(a, b)
b = ()(a, b)
";

/// Names accepted by [`by_name`], besides `kneading:<bits>`.
pub const NAMES: [&str; 4] = ["adding", "basilica", "grigorchuk", "lamplighter"];

pub fn adding_machine() -> GroupDef {
    GroupDef::parse(ADDING_MACHINE).expect("built-in definition")
}

pub fn basilica() -> GroupDef {
    GroupDef::parse(BASILICA).expect("built-in definition")
}

pub fn grigorchuk() -> GroupDef {
    GroupDef::parse(GRIGORCHUK).expect("built-in definition")
}

pub fn lamplighter() -> GroupDef {
    GroupDef::parse(LAMPLIGHTER).expect("built-in definition")
}

/// Generators `a0 … a{n-1}` for a kneading sequence of length `n − 1`:
/// `a0 = (0 1)(e, a{n-1})`, and `a_i` copies `a_{i-1}` below letter
/// `v[i-1]`.
pub fn kneading_text(v: &str) -> Result<String> {
    if let Some(bad) = v.chars().find(|c| *c != '0' && *c != '1') {
        return Err(Error::Parse(format!(
            "kneading sequence must be binary, found {bad:?}"
        )));
    }
    let n = v.len() + 1;
    let mut text = String::from("alphabet: 2\n");
    text.push_str(&format!("a0 = (0 1)(e, a{})\n", n - 1));
    for (i, bit) in v.chars().enumerate() {
        let i = i + 1;
        let below = format!("a{}", i - 1);
        if bit == '0' {
            text.push_str(&format!("a{i} = ()({below}, e)\n"));
        } else {
            text.push_str(&format!("a{i} = ()(e, {below})\n"));
        }
    }
    Ok(text)
}

pub fn kneading(v: &str) -> Result<GroupDef> {
    GroupDef::parse(&kneading_text(v)?)
}

/// Looks up a catalogue entry: one of [`NAMES`] or `kneading:<bits>`.
pub fn by_name(name: &str) -> Option<Result<GroupDef>> {
    if let Some(bits) = name.strip_prefix("kneading:") {
        return Some(kneading(bits));
    }
    let def = match name {
        "adding" => adding_machine(),
        "basilica" => basilica(),
        "grigorchuk" => grigorchuk(),
        "lamplighter" => lamplighter(),
        _ => return None,
    };
    Some(Ok(def))
}

/// All binary sequences of length at most `max_len`, shortest first.
pub fn kneading_sequences(max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for len in 1..=max_len {
        for bits in 0..1u32 << len {
            out.push(
                (0..len)
                    .map(|i| {
                        if bits >> (len - 1 - i) & 1 == 1 {
                            '1'
                        } else {
                            '0'
                        }
                    })
                    .collect(),
            );
        }
    }
    out
}
