use super::{TrustError, TrustTable};

/// Maps a project's trustability onto the display scale 1..=10.
///
/// The scale is the rank-percentile decile `ceil(10 · |{q : T_q ≤ T_p}| / N)`.
/// Ties count toward the higher rank, so equal scores share the higher decile.
pub fn map_to_trust_scale(trust: &TrustTable, project: &str) -> Result<u8, TrustError> {
    let own = trust
        .get(project)
        .ok_or_else(|| TrustError::UnknownProject(project.into()))?;
    let at_or_below = trust.values().filter(|&t| t <= own).count();
    let fraction = at_or_below as f64 / trust.len() as f64;
    Ok(((10.0 * fraction).ceil() as u8).clamp(1, 10))
}
