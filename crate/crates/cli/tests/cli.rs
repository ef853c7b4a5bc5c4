use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn seceq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seceq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("seceq-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The first player moves once; the others only care where.
const FORK: &str = r#"
players = ["1", "2", "3"]
initial = "s"

[[states]]
name = "s"
controller = "1"
actions = [
  { name = "left", transitions = [["l", "1"]] },
  { name = "right", transitions = [["r", "1"]] },
]

[[states]]
name = "l"
controller = "1"
actions = [{ name = "stay", transitions = [["l", "1"]] }]

[[states]]
name = "r"
controller = "1"
actions = [{ name = "stay", transitions = [["r", "1"]] }]

[[payoffs]]
player = "1"
family = "reached_set"
targets = [["l"], ["r"]]
values = ["0", "1", "1", "0"]

[[payoffs]]
player = "2"
family = "reached_set"
targets = [["l"], ["r"]]
values = ["0", "2", "0", "0"]

[[payoffs]]
player = "3"
family = "reached_set"
targets = [["l"], ["r"]]
values = ["0", "0", "2", "0"]
"#;

/// Two players, payoffs in {0, 1}.
const BINARY: &str = r#"
players = ["a", "b"]
initial = "x"

[[states]]
name = "x"
controller = "a"
actions = [
  { name = "go", transitions = [["y", "1"]] },
  { name = "wait", transitions = [["x", "1"]] },
]

[[states]]
name = "y"
controller = "b"
actions = [{ name = "stay", transitions = [["y", "1"]] }]

[[payoffs]]
player = "a"
family = "reached_set"
targets = [["y"]]
values = ["0", "1"]

[[payoffs]]
player = "b"
family = "reached_set"
targets = [["y"]]
values = ["1", "0"]
"#;

#[test]
fn gen_is_deterministic() {
    for family in ["discounted", "finite-horizon", "reached-set", "capped-hitting"] {
        let args = ["gen", "--seed", "42", "--family", family, "--players", "3", "--states", "6"];
        let a = seceq(&args);
        let b = seceq(&args);
        assert!(a.status.success(), "{}", stderr(&a));
        assert_eq!(a.stdout, b.stdout);
        let other = seceq(&["gen", "--seed", "43", "--family", family, "--players", "3", "--states", "6"]);
        assert_ne!(a.stdout, other.stdout);
    }
}

#[test]
fn solved_documents_verify() {
    let dir = scratch("pipeline");
    let cases: [&[&str]; 4] = [
        &["--family", "discounted", "--stochastic"],
        &["--family", "finite-horizon", "--horizon", "3"],
        &["--family", "reached-set", "--labels", "2"],
        &["--family", "capped-hitting"],
    ];
    for (k, extra) in cases.iter().enumerate() {
        let game = dir.join(format!("game{k}.toml"));
        let solved = dir.join(format!("solved{k}.toml"));
        let mut args = vec!["gen", "--seed", "9", "--players", "3", "--states", "4", "--out"];
        args.push(game.to_str().unwrap());
        args.extend_from_slice(extra);
        assert!(seceq(&args).status.success());
        let o = seceq(&[
            "--format",
            "structured",
            "--out",
            solved.to_str().unwrap(),
            "solve",
            game.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let v = seceq(&["verify", solved.to_str().unwrap()]);
        assert!(v.status.success(), "{}{}", stdout(&v), stderr(&v));
        assert!(stdout(&v).contains("secure           holds"));
    }
}

#[test]
fn fork_has_two_secure_equilibria() {
    let dir = scratch("fork");
    let file = dir.join("fork.toml");
    fs::write(&file, FORK).unwrap();
    let f = file.to_str().unwrap();

    let o = seceq(&["oracle", f]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("2 profiles"), "{text}");
    assert!(text.contains("(1, 2, 0)") && text.contains("(1, 0, 2)"));

    let o = seceq(&["solve", f]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("engine thm2"));
    assert!(stdout(&o).contains("strongly_secure  fails"));
}

#[test]
fn transform_prints_delta() {
    let dir = scratch("delta");
    let file = dir.join("binary.toml");
    fs::write(&file, BINARY).unwrap();
    let o = seceq(&["transform", file.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("delta = 1/4"), "{}", stdout(&o));
    let o = seceq(&["--format", "structured", "transform", file.to_str().unwrap()]);
    assert!(stdout(&o).contains("\"1/4\""), "{}", stdout(&o));
}

#[test]
fn single_action_game_has_one_level() {
    let dir = scratch("single");
    let file = dir.join("one.toml");
    let f = file.to_str().unwrap();
    let o = seceq(&["gen", "--family", "discounted", "--states", "3", "--max-actions", "1", "--out", f]);
    assert!(o.status.success());
    let o = seceq(&["eliminate", f]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("fixpoint reached after 1 levels"), "{}", stdout(&o));
    let o = seceq(&["--format", "structured", "eliminate", f]);
    assert_eq!(stdout(&o).matches("[[trace.levels]]").count(), 1);
}

#[test]
fn weights_are_checked() {
    let dir = scratch("weights");
    let file = dir.join("d.toml");
    let f = file.to_str().unwrap();
    assert!(seceq(&["gen", "--family", "discounted", "--players", "3", "--out", f]).status.success());
    let o = seceq(&["solve", f, "--weights", "1,2,1/2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("weighted"));
    for bad in ["1,2", "1,x,1", "1,-1,1"] {
        let o = seceq(&["solve", f, "--weights", bad]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
    }
}

#[test]
fn input_errors_exit_with_two() {
    let dir = scratch("errors");
    let game = dir.join("game.toml");
    fs::write(&game, FORK).unwrap();
    let o = seceq(&["verify", game.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no profile"));

    let broken = dir.join("broken.toml");
    fs::write(&broken, "players = [\"a\"\ninitial = 3\n").unwrap();
    let o = seceq(&["solve", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let o = seceq(&["solve", dir.join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = seceq(&["eliminate", game.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_verification_exits_with_one() {
    let dir = scratch("fails");
    let file = dir.join("bad.toml");
    // The first player waits forever: not a Nash equilibrium.
    let doc = format!(
        "{BINARY}\n[profile]\nmemories = [{{ size = 1, initial = 0 }}]\nstrategies = [\n  \
         {{ player = \"a\", memory = 0, choices = [[0, \"x\", \"wait\"]] }},\n  \
         {{ player = \"b\", memory = 0 }},\n]\n"
    );
    fs::write(&file, doc).unwrap();
    let o = seceq(&["verify", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("nash             fails"));
}
