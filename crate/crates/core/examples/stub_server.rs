//! Serve a scenario's oracle plan as a chat-completions endpoint, for trying
//! the CLI's LLM path without a model.
//!
//!     cargo run --example stub_server -- 127.0.0.1:8808 pollution_01
//!     embodied-safety run --agent llm --endpoint http://127.0.0.1:8808/v1/chat/completions \
//!         --only pollution_01 --runs 1 --out results

use embodied_safety::agents::{decision_json, StubReply, StubServer};
use embodied_safety::scenarios::{bundled_dir, load_suite, plan_oracle};

fn main() {
    let mut args = std::env::args().skip(1);
    let addr = args.next().unwrap_or_else(|| "127.0.0.1:8808".into());
    let id = args.next().unwrap_or_else(|| "pollution_01".into());
    let suite = load_suite(&bundled_dir()).expect("bundled suite");
    let scenario = suite.get(&id).expect("scenario id");
    let plan = plan_oracle(scenario, &scenario.episode_config()).unwrap();
    let script = plan
        .iter()
        .map(|a| StubReply::Content(decision_json("Scripted step.", &a.to_string())))
        .collect();
    let server = StubServer::start_on(&addr, script).unwrap();
    eprintln!("serving {} scripted replies for {id} at {}", plan.len(), server.url());
    server.serve_forever();
}
