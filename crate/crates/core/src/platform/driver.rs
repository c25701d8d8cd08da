//! Simulated participants played through the service, interleaved the way
//! concurrent browsers would be.

use super::service::{ActionRequest, PreferenceRequest, Service};
use super::state::RoundResult;
use super::PlatformError;
use crate::agents::{prefer, Beliefs, Experience, SimulationConfig};
use crate::analysis::{Dataset, Source};
use crate::protocol::Stage;
use crate::rng;
use num_rational::Ratio;
use rand::Rng;

struct Client {
    session_id: String,
    beliefs: Beliefs,
    experience: Experience,
}

/// Runs `participants` agent sessions to completion with at most
/// `concurrency` open at once, stepping a random open session each time.
/// Returns every trial and preference the clients saw resolved.
pub fn drive_agents(
    service: &mut Service,
    participants: usize,
    concurrency: usize,
    config: &SimulationConfig,
    seed: u64,
) -> Result<Dataset, PlatformError> {
    config.validate(service.state().space.width())?;
    let mut rng = rng::keyed(seed, "driver");
    let mut open: Vec<Client> = Vec::new();
    let mut created = 0;
    let mut seen = Dataset::default();
    while created < participants || !open.is_empty() {
        while created < participants && open.len() < concurrency.max(1) {
            let d = service.create_session()?;
            open.push(Client { session_id: d.session_id, beliefs: Beliefs::default(), experience: Experience::default() });
            created += 1;
        }
        let i = rng.gen_range(0..open.len());
        if step(service, &mut open[i], config, &mut rng, &mut seen)? {
            open.swap_remove(i);
        }
    }
    Ok(seen)
}

/// Advances one client by one request; true once the session is finished.
fn step<R: Rng>(
    service: &mut Service,
    client: &mut Client,
    config: &SimulationConfig,
    rng: &mut R,
    seen: &mut Dataset,
) -> Result<bool, PlatformError> {
    let id = client.session_id.clone();
    let view = service.get_state(&id)?;
    match view.stage {
        Stage::Tutorial | Stage::Quiz => {
            service.submit_action(&id, ActionRequest::Continue)?;
        }
        Stage::Stage1 | Stage::Stage2 | Stage::Stage4 => {
            let (label, p) = service.presentation(&id)?;
            let action = config.policy.act(&p, label, &client.beliefs, rng);
            let out = service.submit_action_as(&id, ActionRequest::Move { action, round: view.round }, Source::Agent)?;
            match out.result {
                Some(RoundResult::Revealed { other_move, own_payoff, .. }) => {
                    // displayed/canonical relabelings are involutions
                    client.beliefs.observe(label, p.role, p.opponent_to_displayed(other_move));
                    client.experience.record(label, own_payoff);
                }
                Some(RoundResult::Committed { estimated_bonus, .. }) => {
                    let bonus: Ratio<u64> =
                        estimated_bonus.parse().map_err(|_| PlatformError::Corrupt(estimated_bonus.clone()))?;
                    client.experience.record(label, *bonus.numer() as f64 / *bonus.denom() as f64);
                }
                None => {}
            }
            seen.trials.extend(out.trial);
        }
        Stage::Choice => {
            let pair = service.state().session(&id)?.condition.pair;
            let chosen = prefer(&config.model, pair, &service.state().space, &client.experience, rng)?;
            service.submit_preference(&id, PreferenceRequest { option: None, chosen: Some(chosen) })?;
            seen.preferences.push(service.state().preferences.last().cloned().expect("just chosen"));
        }
        Stage::Survey => {
            service.submit_survey(&id, serde_json::json!({ "agent": config.policy.kind.to_string() }))?;
        }
        Stage::Done => return Ok(true),
    }
    Ok(!service.state().session(&id)?.is_open())
}
