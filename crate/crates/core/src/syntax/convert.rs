//! Gives operator applications their feature-term meaning.

use super::ast::{ClauseItem, DeclItem, FeatureDecl, FinDomExpr, ItemKind, Pos, SourceTerm};
use super::parser::Ast;
use super::{PlainClause, SyntaxError};

pub(crate) fn item(ast: &Ast, pos: Pos) -> Result<ItemKind, SyntaxError> {
    if let Some([head, body]) = ast.as_op(":-", 2) {
        let head = clause_head(head, pos)?;
        let body = goals(body, pos)?;
        return Ok(ItemKind::Clause(ClauseItem { head, body }));
    }
    if ast.as_op(":-", 1).is_some() {
        return Err(SyntaxError::invalid(pos, "directives are not supported"));
    }
    if ast.as_op("?-", 1).is_some() {
        return Err(SyntaxError::invalid(pos, "queries cannot appear in a program"));
    }
    if let Some([head, value]) = ast.as_op(":=", 2) {
        let head = term(head, pos)?;
        if !matches!(head, SourceTerm::Atom(_) | SourceTerm::Compound(..)) {
            return Err(SyntaxError::invalid(pos, "template name must be an atom or compound"));
        }
        return Ok(ItemKind::Decl(DeclItem::Template { head, body: term(value, pos)? }));
    }
    if let Some([left, feats]) = ast.as_op("intro", 2) {
        let features = feature_list(feats, pos)?;
        if let Some([sort, dims]) = left.as_op(">", 2) {
            return Ok(ItemKind::Decl(DeclItem::Combined {
                sort: symbol(sort, pos, "sort name")?,
                dimensions: dimensions(dims, pos)?,
                features,
            }));
        }
        return Ok(ItemKind::Decl(DeclItem::Intro { sort: symbol(left, pos, "sort name")?, features }));
    }
    if let Some([sort, dims]) = ast.as_op(">", 2) {
        return Ok(ItemKind::Decl(DeclItem::Subsort {
            sort: symbol(sort, pos, "sort name")?,
            dimensions: dimensions(dims, pos)?,
        }));
    }
    if let Some([name, dims]) = ast.as_op("fin_dom", 2) {
        return Ok(ItemKind::Decl(DeclItem::FinDom {
            name: symbol(name, pos, "domain name")?,
            dimensions: dimensions(dims, pos)?,
        }));
    }
    if let Some([list]) = ast.as_op("extensional", 1) {
        let sorts = list_items(list, pos)?
            .into_iter()
            .map(|a| symbol(a, pos, "sort name"))
            .collect::<Result<_, _>>()?;
        return Ok(ItemKind::Decl(DeclItem::Extensional { sorts }));
    }
    Ok(ItemKind::Clause(ClauseItem { head: clause_head(ast, pos)?, body: Vec::new() }))
}

pub(crate) fn query(ast: &Ast, pos: Pos) -> Result<Vec<SourceTerm>, SyntaxError> {
    let body = match ast.as_op("?-", 1) {
        Some([g]) => g,
        _ => ast,
    };
    goals(body, pos)
}

fn clause_head(ast: &Ast, pos: Pos) -> Result<SourceTerm, SyntaxError> {
    match ast {
        Ast::Var(_) => Err(SyntaxError::invalid(pos, "clause head cannot be a variable")),
        Ast::Int(_) => Err(SyntaxError::invalid(pos, "clause head cannot be a number")),
        _ => {
            let t = term(ast, pos)?;
            match t {
                SourceTerm::Atom(_) | SourceTerm::Compound(..) => Ok(t),
                _ => Err(SyntaxError::invalid(pos, "clause head must be an atom or compound term")),
            }
        }
    }
}

fn goals(ast: &Ast, pos: Pos) -> Result<Vec<SourceTerm>, SyntaxError> {
    let mut out = Vec::new();
    let mut cur = ast;
    loop {
        match cur.as_op(",", 2) {
            Some([l, r]) => {
                out.extend(goals(l, pos)?);
                cur = r;
            }
            _ => {
                out.push(term(cur, pos)?);
                return Ok(out);
            }
        }
    }
}

fn symbol(ast: &Ast, pos: Pos, what: &str) -> Result<String, SyntaxError> {
    match ast {
        Ast::Atom { name, .. } if name != "[]" => Ok(name.clone()),
        _ => Err(SyntaxError::invalid(pos, format!("expected {what}"))),
    }
}

fn list_items(ast: &Ast, pos: Pos) -> Result<Vec<&Ast>, SyntaxError> {
    let mut out = Vec::new();
    let mut cur = ast;
    loop {
        match cur {
            Ast::Atom { name, quoted: false } if name == "[]" => return Ok(out),
            _ => match cur.as_op(".", 2) {
                Some([h, t]) => {
                    out.push(h);
                    cur = t;
                }
                _ => return Err(SyntaxError::invalid(pos, "expected a proper list")),
            },
        }
    }
}

fn dimensions(ast: &Ast, pos: Pos) -> Result<Vec<Vec<String>>, SyntaxError> {
    if let Some([l, r]) = ast.as_op("*", 2) {
        let mut dims = dimensions(l, pos)?;
        dims.extend(dimensions(r, pos)?);
        return Ok(dims);
    }
    let items = list_items(ast, pos)?;
    if items.is_empty() {
        return Err(SyntaxError::invalid(pos, "dimension lists must be non-empty"));
    }
    let dim = items
        .into_iter()
        .map(|a| match a {
            Ast::Int(n) => Ok(n.to_string()),
            other => symbol(other, pos, "atom in dimension list"),
        })
        .collect::<Result<_, _>>()?;
    Ok(vec![dim])
}

fn feature_list(ast: &Ast, pos: Pos) -> Result<Vec<FeatureDecl>, SyntaxError> {
    list_items(ast, pos)?
        .into_iter()
        .map(|a| match a.as_op(":", 2) {
            Some([f, r]) => Ok(FeatureDecl {
                feature: symbol(f, pos, "feature name")?,
                restriction: symbol(r, pos, "feature restriction")?,
            }),
            _ => Ok(FeatureDecl { feature: symbol(a, pos, "feature name")?, restriction: "top".into() }),
        })
        .collect()
}

/// Leaves are atoms and integers; at least one connective or annotation.
fn findom_leaf(ast: &Ast) -> bool {
    match ast {
        Ast::Int(_) => true,
        Ast::Atom { name, .. } => name != "[]",
        _ => false,
    }
}

fn findom_shaped(ast: &Ast) -> bool {
    if let Some([l, r]) = ast.as_op("&", 2).or_else(|| ast.as_op("or", 2)) {
        return findom_operand(l) && findom_operand(r);
    }
    if let Some([e]) = ast.as_op("~", 1) {
        return findom_operand(e);
    }
    if let Some([e, d]) = ast.as_op("@", 2) {
        return findom_operand(e) && matches!(d, Ast::Atom { .. });
    }
    false
}

fn findom_operand(ast: &Ast) -> bool {
    findom_leaf(ast) || findom_shaped(ast)
}

fn findom(ast: &Ast, pos: Pos) -> Result<FinDomExpr, SyntaxError> {
    if let Some([l, r]) = ast.as_op("&", 2) {
        return Ok(FinDomExpr::And(Box::new(findom(l, pos)?), Box::new(findom(r, pos)?)));
    }
    if let Some([l, r]) = ast.as_op("or", 2) {
        return Ok(FinDomExpr::Or(Box::new(findom(l, pos)?), Box::new(findom(r, pos)?)));
    }
    if let Some([e]) = ast.as_op("~", 1) {
        return Ok(FinDomExpr::Neg(Box::new(findom(e, pos)?)));
    }
    if let Some([e, d]) = ast.as_op("@", 2) {
        return Ok(FinDomExpr::Annot(Box::new(findom(e, pos)?), symbol(d, pos, "domain name")?));
    }
    match ast {
        Ast::Int(n) => Ok(FinDomExpr::Atom(n.to_string())),
        Ast::Atom { name, .. } => Ok(FinDomExpr::Atom(name.clone())),
        _ => Err(SyntaxError::invalid(pos, "finite-domain expressions may only combine atoms")),
    }
}

pub(crate) fn term(ast: &Ast, pos: Pos) -> Result<SourceTerm, SyntaxError> {
    match ast {
        Ast::Var(v) => return Ok(SourceTerm::Var(v.clone())),
        Ast::Int(n) => return Ok(SourceTerm::Int(*n)),
        Ast::Atom { name, .. } => return Ok(SourceTerm::Atom(name.clone())),
        Ast::Compound { quoted: true, name, args } => {
            return Ok(SourceTerm::Compound(name.clone(), args.iter().map(|a| term(a, pos)).collect::<Result<_, _>>()?));
        }
        Ast::Compound { .. } => {}
    }
    if findom_shaped(ast) {
        return Ok(SourceTerm::FinDom(findom(ast, pos)?));
    }
    if let Some([l, r]) = ast.as_op("&", 2) {
        return Ok(SourceTerm::conj(term(l, pos)?, term(r, pos)?));
    }
    if let Some([l, r]) = ast.as_op("or", 2) {
        return Ok(SourceTerm::disj(term(l, pos)?, term(r, pos)?));
    }
    if ast.as_op("~", 1).is_some() {
        return Err(SyntaxError::invalid(pos, "negation `~` applies only to finite-domain atoms"));
    }
    if let Some([l, d]) = ast.as_op("@", 2) {
        let domain = symbol(d, pos, "domain name after `@`")?;
        return match l {
            Ast::Var(v) => Ok(SourceTerm::conj(
                SourceTerm::Var(v.clone()),
                SourceTerm::FinDom(FinDomExpr::Annot(Box::new(FinDomExpr::Full), domain)),
            )),
            _ => Err(SyntaxError::invalid(pos, "`@` annotation needs a finite-domain atom or variable")),
        };
    }
    if let Some([t]) = ast.as_op("@", 1) {
        return match t {
            Ast::Atom { name, .. } => Ok(SourceTerm::TemplateCall(name.clone(), Vec::new())),
            Ast::Compound { name, args, .. } => Ok(SourceTerm::TemplateCall(
                name.clone(),
                args.iter().map(|a| term(a, pos)).collect::<Result<_, _>>()?,
            )),
            _ => Err(SyntaxError::invalid(pos, "template call needs a template name")),
        };
    }
    if let Some([f, v]) = ast.as_op("!", 2) {
        return Ok(SourceTerm::feat(symbol(f, pos, "feature name before `!`")?, term(v, pos)?));
    }
    if let Some([s]) = ast.as_op("<", 1) {
        return Ok(SourceTerm::sort(symbol(s, pos, "sort name after `<`")?));
    }
    if let Some([fv]) = ast.as_op(">>>", 1) {
        let (feature, value) = search_target(fv, pos)?;
        return Ok(SourceTerm::Search { start: None, feature, value: Box::new(value) });
    }
    if let Some([s, fv]) = ast.as_op(">>>", 2) {
        let start = symbol(s, pos, "sort name before `>>>`")?;
        let (feature, value) = search_target(fv, pos)?;
        return Ok(SourceTerm::Search { start: Some(start), feature, value: Box::new(value) });
    }
    if let Some([t]) = ast.as_op("`", 1) {
        return Ok(SourceTerm::Quote(Box::new(plain(t))));
    }
    if let Some([t]) = ast.as_op("``", 1) {
        let inner = match t {
            Ast::Compound { name, args, .. } => {
                SourceTerm::Compound(name.clone(), args.iter().map(|a| term(a, pos)).collect::<Result<_, _>>()?)
            }
            other => plain(other),
        };
        return Ok(SourceTerm::DoubleQuote(Box::new(inner)));
    }
    let Ast::Compound { name, args, .. } = ast else { unreachable!() };
    Ok(SourceTerm::Compound(name.clone(), args.iter().map(|a| term(a, pos)).collect::<Result<_, _>>()?))
}

fn search_target(ast: &Ast, pos: Pos) -> Result<(String, SourceTerm), SyntaxError> {
    match ast.as_op("!", 2) {
        Some([f, v]) => Ok((symbol(f, pos, "feature name")?, term(v, pos)?)),
        _ => Err(SyntaxError::invalid(pos, "feature search `>>>` must be followed by Feature!Value")),
    }
}

/// Raw reading: operators are ordinary functors.
pub(crate) fn plain(ast: &Ast) -> SourceTerm {
    match ast {
        Ast::Var(v) => SourceTerm::Var(v.clone()),
        Ast::Int(n) => SourceTerm::Int(*n),
        Ast::Atom { name, .. } => SourceTerm::Atom(name.clone()),
        Ast::Compound { name, args, .. } => SourceTerm::Compound(name.clone(), args.iter().map(plain).collect()),
    }
}

pub(crate) fn plain_clause(ast: &Ast, pos: Pos) -> Result<PlainClause, SyntaxError> {
    let (head, body) = match ast.as_op(":-", 2) {
        Some([h, b]) => {
            let mut goals = Vec::new();
            let mut cur = b;
            while let Some([l, r]) = cur.as_op(",", 2) {
                goals.push(plain(l));
                cur = r;
            }
            goals.push(plain(cur));
            (plain(h), goals)
        }
        _ => (plain(ast), Vec::new()),
    };
    match head {
        SourceTerm::Atom(_) | SourceTerm::Compound(..) => Ok(PlainClause { head, body }),
        _ => Err(SyntaxError::invalid(pos, "clause head must be an atom or compound term")),
    }
}
