/// Splits text into lowercase search terms.
///
/// Words are maximal alphanumeric runs. Each word is emitted whole, followed
/// by its camel-case humps when it has more than one (`ArrayComparisonFailure`
/// yields `arraycomparisonfailure`, `array`, `comparison`, `failure`).
/// Acronym runs stay together: `XMLParser` has humps `xml` and `parser`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split(|c: char| !c.is_alphanumeric()) {
        if word.is_empty() {
            continue;
        }
        out.push(word.to_lowercase());
        let humps = camel_humps(word);
        if humps.len() > 1 {
            out.extend(humps.into_iter().map(str::to_lowercase));
        }
    }
    out
}

fn camel_humps(word: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = word.char_indices().collect();
    let mut humps = Vec::new();
    let mut start = 0;
    for i in 1..chars.len() {
        let (at, c) = chars[i];
        let prev = chars[i - 1].1;
        let lower_to_upper = prev.is_lowercase() && c.is_uppercase();
        let acronym_end =
            prev.is_uppercase() && c.is_uppercase() && chars.get(i + 1).is_some_and(|&(_, n)| n.is_lowercase());
        if lower_to_upper || acronym_end {
            humps.push(&word[start..at]);
            start = at;
        }
    }
    humps.push(&word[start..]);
    humps
}
