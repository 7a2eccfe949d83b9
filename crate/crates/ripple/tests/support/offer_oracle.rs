// Brute-force offer matcher: rescans the whole book before every fill and
// prices each fill with exact rationals.

use ledgergraph_core::Rational;
use ledgergraph_ripple::Offer;

pub struct OracleFill {
    pub maker_sequence: u64,
    pub maker_gave: i128,
    pub taker_gave: i128,
}

fn ceil(r: Rational) -> i128 {
    r.ceil().to_integer()
}

pub fn oracle_place(book: &mut Vec<Offer>, taker: &Offer) -> Vec<OracleFill> {
    let mut fills = Vec::new();
    let mut give = taker.gets;
    let mut want = taker.pays;
    let limit = Rational::new(taker.gets, taker.pays);
    loop {
        if give == 0 || want == 0 {
            break;
        }
        let mut best: Option<usize> = None;
        for (i, m) in book.iter().enumerate() {
            if m.gets_asset != taker.pays_asset || m.pays_asset != taker.gets_asset {
                continue;
            }
            let price = Rational::new(m.pays, m.gets);
            if price > limit {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) => {
                    let bp = Rational::new(book[b].pays, book[b].gets);
                    if price < bp || (price == bp && m.sequence < book[b].sequence) {
                        Some(i)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let Some(i) = best else { break };
        let m = book[i].clone();
        let price = Rational::new(m.pays, m.gets);
        let cost_of = |q: i128| if q == m.gets { m.pays } else { ceil(price * q) };
        let mut q = want.min(m.gets);
        if cost_of(q) > give {
            q = (Rational::from_integer(give) / price).floor().to_integer();
        }
        if q == 0 {
            break;
        }
        let cost = cost_of(q);
        assert!(cost <= give);
        fills.push(OracleFill {
            maker_sequence: m.sequence,
            maker_gave: q,
            taker_gave: cost,
        });
        give -= cost;
        want -= q;
        book[i].gets -= q;
        book[i].pays = ceil(price * book[i].gets);
        if book[i].gets <= 0 || book[i].pays <= 0 {
            book.remove(i);
        }
    }
    if give > 0 && want > 0 {
        let gets = give.min(
            (Rational::new(taker.gets, taker.pays) * want)
                .floor()
                .to_integer(),
        );
        if gets > 0 {
            book.push(Offer {
                gets,
                pays: want,
                ..taker.clone()
            });
        }
    }
    fills
}
