/// Parses `lo:step:hi` (inclusive), `a,b,c` or a single count.
pub fn parse_sweep(text: &str) -> Result<Vec<usize>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty sweep".into());
    }
    let number = |s: &str| -> Result<usize, String> {
        s.trim()
            .parse()
            .map_err(|_| format!("invalid count `{}` in sweep `{text}`", s.trim()))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [lo, step, hi] = parts[..] else {
            return Err(format!("sweep `{text}` must have the form lo:step:hi"));
        };
        let (lo, step, hi) = (number(lo)?, number(step)?, number(hi)?);
        if step == 0 {
            return Err(format!("sweep `{text}` has a zero step"));
        }
        if lo > hi {
            return Err(format!("sweep `{text}` has lo > hi"));
        }
        Ok((lo..=hi).step_by(step).collect())
    } else {
        text.split(',').map(number).collect()
    }
}
