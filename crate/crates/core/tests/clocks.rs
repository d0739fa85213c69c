use proptest::prelude::*;
use tickdiff::clocks::{
    bin_real_time, bin_transaction_time, shuffle_transaction_time, trade_returns, ClockSpec,
    ShuffleScope, TradeRecord,
};

fn sessions_strategy() -> impl Strategy<Value = Vec<TradeRecord>> {
    // up to 4 sessions of 2..60 trades over a 3600 s session
    prop::collection::vec(
        prop::collection::vec((0.0f64..3600.0, -0.5f64..0.5), 2..60),
        1..4,
    )
    .prop_map(|sessions| {
        let mut trades = Vec::new();
        let mut price = 50.0;
        for (s, mut moves) in sessions.into_iter().enumerate() {
            moves.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (t, dp) in moves {
                price += dp;
                trades.push(TradeRecord::new(s as i64, t, price));
            }
        }
        trades
    })
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #[test]
    fn conservation_and_count_matching(trades in sessions_strategy(), seed in any::<u64>(), per_session in any::<bool>()) {
        let spec = ClockSpec {
            bin_seconds: 600.0,
            session_seconds: 3600.0,
            shuffle_seed: seed,
            shuffle_scope: if per_session { ShuffleScope::PerSession } else { ShuffleScope::FullSample },
            ..ClockSpec::default()
        };
        let real = bin_real_time(&trades, &spec).unwrap();
        let shuffled = shuffle_transaction_time(&trades, &spec).unwrap();
        prop_assert_eq!(&real.counts, &shuffled.counts);

        for (summary, (_, total)) in real.sessions.iter().zip(real.session_totals()) {
            let change = summary.close_price - summary.open_price;
            prop_assert!((total + summary.dropped_return - change).abs() < 1e-9);
        }
        let all: f64 = shuffled.returns.iter().sum();
        let expected: f64 = real.returns.iter().sum();
        prop_assert!((all - expected).abs() < 1e-9);

        let tx = bin_transaction_time(&trades, 3);
        if let Ok(tx) = tx {
            prop_assert!(tx.counts.iter().all(|&c| c == 3));
            for (summary, (_, total)) in tx.sessions.iter().zip(tx.session_totals()) {
                let change = summary.close_price - summary.open_price;
                prop_assert!((total + summary.dropped_return - change).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn per_trade_returns_telescope(trades in sessions_strategy()) {
        let r = trade_returns(&trades).unwrap();
        let labels = r.bin_labels().unwrap();
        for session in trades.chunk_by(|a, b| a.session == b.session) {
            let id = session[0].session;
            let sum: f64 = r.values().iter().zip(labels).filter(|(_, l)| **l == id).map(|(v, _)| v).sum();
            let change = session[session.len() - 1].price - session[0].price;
            prop_assert!((sum - change).abs() < 1e-9);
        }
        prop_assert_eq!(r.len(), trades.len() - trades.chunk_by(|a, b| a.session == b.session).count());
    }
}

#[test]
fn shuffle_preserves_return_multiset() {
    // one-trade-per-bin layout so every bin is a single transaction return
    let mut trades = vec![TradeRecord::new(0, 0.0, 10.0)];
    let moves = [0.3, -0.1, 0.25, -0.4, 0.05, 0.0];
    let mut price = 10.0;
    for (i, m) in moves.iter().enumerate() {
        price += m;
        trades.push(TradeRecord::new(0, 600.0 * i as f64 + 1.0, price));
    }
    let spec = ClockSpec {
        bin_seconds: 600.0,
        session_seconds: 3600.0,
        shuffle_seed: 3,
        ..ClockSpec::default()
    };
    let real = bin_real_time(&trades, &spec).unwrap();
    let shuffled = shuffle_transaction_time(&trades, &spec).unwrap();
    assert_eq!(real.counts, vec![1; 6]);
    assert_eq!(sorted(real.returns.clone()), sorted(shuffled.returns.clone()));
}
