//! Builds rules from spec strings and from code, then compares them.

use prizealloc::io::parse_rule_spec;
use prizealloc::model::Competition;
use prizealloc::rules::{allocate, MonotoneFn, ParametricFamily, PiecewiseLinear, RuleSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let comp = Competition::canonical(4, 10.0)?;
    let from_text = [
        "interval:[1,2.5];[2.5,3];[3.5,inf]",
        "sp:pwl=1:0,3:1",
        "param:list=identity|shift=1|shift=3|zero",
        "proportional:40,30,20,10",
    ];
    for text in from_text {
        let rule = parse_rule_spec(text)?;
        println!("{rule:<40} {:?}", allocate(&rule, &comp)?.by_position());
    }

    let kinked = PiecewiseLinear::new(vec![(1.0, 0.0), (3.0, 1.0)])?;
    let flatter = PiecewiseLinear::new(vec![(3.0, 0.0), (5.0, 0.5)])?;
    let built = RuleSpec::Parametric(ParametricFamily::Listed(vec![
        MonotoneFn::Identity,
        MonotoneFn::Piecewise(kinked),
        MonotoneFn::Piecewise(flatter),
        MonotoneFn::Zero,
    ]));
    built.validate()?;
    println!("{built:<40} {:?}", allocate(&built, &comp)?.by_position());

    match parse_rule_spec("geometric:lambda=1.5") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
