//! The LLM agent end to end against the bundled stub endpoint. The stub
//! first answers with prose, which the agent rejects and re-prompts, then
//! walks through the oracle plan.
//!
//!     cargo run --example llm_agent_stub

use std::sync::Arc;
use std::time::Duration;

use embodied_safety::agents::{decision_json, HttpChatClient, LlmAgent, LlmConfig, StubReply, StubServer};
use embodied_safety::harness::run_episode;
use embodied_safety::scenarios::{bundled_dir, load_suite, plan_oracle, Setting};

fn main() {
    let suite = load_suite(&bundled_dir()).expect("bundled suite");
    let scenario = suite.get("fluid_01").unwrap();
    let cfg = scenario.episode_config();
    let plan = plan_oracle(scenario, &cfg).unwrap();

    let mut script = vec![StubReply::Content("Sure! I will wash the mug.".into())];
    script.extend(plan.iter().map(|a| StubReply::Content(decision_json("Following the plan.", &a.to_string()))));
    let server = StubServer::start(script).unwrap();

    let config = LlmConfig { endpoint: server.url(), model: "stub".into(), ..LlmConfig::default() };
    let client = Arc::new(HttpChatClient::new(&config.endpoint, &config.api_key_env, Duration::from_secs(5), 0));
    let mut agent = LlmAgent::new(client, config, &cfg).unwrap();
    let r = run_episode(scenario, &mut agent, &cfg, Setting::Explicit, 0).unwrap();

    for t in &r.trajectory {
        println!("{:>2} {:<26} {}", t.step, t.action, t.feedback);
    }
    println!("GSR {:.2}  CSR {}  requests {}", r.gsr, r.csr, server.requests().len());
    let first = &server.requests()[0].body["messages"];
    println!("\nfirst prompt:\n{}", first[1]["content"].as_str().unwrap_or_default());
}
