//! Mutation fuzzing of the text surfaces: parsers must reject junk with
//! errors, never panic.

use mtool::expr::parse_clopen;
use mtool::formats::parse_object;
use mtool_core::testutil::Gen;

const FIXTURES: &[&str] = &[
    "kind weight\ndepth 3\ndefault 1/2\nw - 1/3\nw 01 2/5\n",
    "kind M\ndepth 2\ndefault 1/2\nw 0 0\n",
    "kind ideal\ndepth 3\ngen 01\ngen 110\n",
    "kind measure\ndepth 2\natoms 1/4 1/4 3/8 1/8\n",
    "kind spine\nspine-head -\nspine-period 0\ntail limit 1/2 coef 1/2 ratio 1/2 from 0\n",
];

#[test]
fn mutated_files_never_panic() {
    let mut gen = Gen::new(31337);
    let alphabet: Vec<char> = "kinddepthgenatoms w-/0123456789\n ".chars().collect();
    for base in FIXTURES {
        for _ in 0..400 {
            let mut bytes: Vec<char> = base.chars().collect();
            for _ in 0..=gen.below(4) {
                let pos = gen.below(bytes.len() as u64) as usize;
                match gen.below(3) {
                    0 => {
                        bytes[pos] = alphabet[gen.below(alphabet.len() as u64) as usize];
                    }
                    1 => {
                        bytes.remove(pos);
                        if bytes.is_empty() {
                            bytes.push('k');
                        }
                    }
                    _ => {
                        let c = alphabet[gen.below(alphabet.len() as u64) as usize];
                        bytes.insert(pos, c);
                    }
                }
            }
            let text: String = bytes.into_iter().collect();
            let _ = parse_object(&text, 16);
        }
    }
}

#[test]
fn random_expressions_never_panic() {
    let mut gen = Gen::new(4242);
    let alphabet: Vec<char> = "[]{}()~+*01 ".chars().collect();
    for _ in 0..3000 {
        let len = 1 + gen.below(24) as usize;
        let text: String = (0..len)
            .map(|_| alphabet[gen.below(alphabet.len() as u64) as usize])
            .collect();
        let _ = parse_clopen(&text, 8);
    }
}
