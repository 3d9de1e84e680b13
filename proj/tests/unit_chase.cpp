#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "gchase/chase.hpp"
#include "gchase/io.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace gchase;
using gchase::testing::Rng;

namespace {

Schema demo_schema() {
    return Schema{{
        {"participant", {"module", "id", "semester"}},
        {"student", {"id", "name", "course"}},
        {"grade", {"module", "id", "semester", "score"}},
    }};
}

GeneralizedInstance demo_instance() {
    GeneralizedInstance i;
    i.object_kind = ObjectKind::InstanceObject;
    i.insert(Atom{"participant", {Term::integer(2), Term::integer(3), Term::integer(4)}});
    i.insert(Atom{"participant",
                  {Term::integer(7), Term::integer(3), Term::null("semester", 1)}});
    i.insert(Atom{"student", {Term::integer(3), Term::text("Max"), Term::text("Math")}});
    i.insert(Atom{"student", {Term::null("id", 1), Term::text("Max"), Term::text("Math")}});
    i.insert(Atom{"student", {Term::integer(7), Term::text("Mia"), Term::null("course", 1)}});
    return i;
}

Dependency demo_tgd() {
    Dependency d;
    d.id = "d1";
    d.source_target = true;
    d.body = {
        Atom{"participant",
             {Term::universal("module", 1), Term::universal("id", 1),
              Term::universal("semester", 1)}},
        Atom{"student",
             {Term::universal("id", 1), Term::text("Max"), Term::universal("course", 1)}},
    };
    d.head = std::vector<Atom>{
        Atom{"grade",
             {Term::universal("module", 1), Term::universal("id", 1),
              Term::existential("semester", 1), Term::existential("score", 1)}},
    };
    return d;
}

Dependency key_egd(const std::string& id = "d1") {
    Dependency d;
    d.id = id;
    d.body = {
        Atom{"R", {Term::universal("x", 1), Term::universal("y1", 1)}},
        Atom{"R", {Term::universal("x", 1), Term::universal("y2", 1)}},
    };
    d.head = EgdHead{Term::universal("y1", 1), Term::universal("y2", 1)};
    return d;
}

Trigger trigger_with_module(const Dependency& d, const GeneralizedInstance& i, std::int64_t m) {
    for (const Trigger& t : find_triggers(d, i))
        if (t.binding.apply(Term::universal("module", 1)) == Term::integer(m)) return t;
    REQUIRE(false);
    return {};
}

}  // namespace

TEST_CASE("apply_tgd_step numbers fresh nulls after the existing ones") {
    const Schema schema = demo_schema();
    const Dependency d = demo_tgd();
    GeneralizedInstance i = demo_instance();
    FreshRegistry reg(schema);
    reg.observe(i);
    reg.observe(d);

    i = apply_tgd_step(i, d, trigger_with_module(d, i, 7), reg);
    CHECK(i.atoms.count(Atom{"grade",
                             {Term::integer(7), Term::integer(3), Term::null("semester", 2),
                              Term::null("score", 1)}}) == 1);

    i = apply_tgd_step(i, d, trigger_with_module(d, i, 2), reg);
    CHECK(i.atoms.count(Atom{"grade",
                             {Term::integer(2), Term::integer(3), Term::null("semester", 3),
                              Term::null("score", 2)}}) == 1);
    CHECK(i.atoms.size() == 7);
}

TEST_CASE("apply_tgd_step on a query object invents existential variables") {
    Schema schema{{{"R", {"a"}}, {"S", {"a", "b"}}}};
    GeneralizedInstance i;
    i.object_kind = ObjectKind::QueryObject;
    i.insert(Atom{"R", {Term::universal("a", 1)}});

    Dependency d;
    d.id = "d1";
    d.body = {Atom{"R", {Term::universal("x", 1)}}};
    d.head = std::vector<Atom>{
        Atom{"S", {Term::universal("x", 1), Term::existential("y", 1)}}};

    FreshRegistry reg(schema);
    reg.observe(i);
    reg.observe(d);
    const auto triggers = find_triggers(d, i);
    REQUIRE(triggers.size() == 1);
    const GeneralizedInstance out = apply_tgd_step(i, d, triggers[0], reg);
    CHECK(out.atoms.count(Atom{"S", {Term::universal("a", 1), Term::existential("b", 1)}}) == 1);
    CHECK(!out.invariant_violation().has_value());
}

TEST_CASE("apply_tgd_step rejects inactive triggers") {
    const Schema schema = demo_schema();
    const Dependency d = demo_tgd();
    GeneralizedInstance i = demo_instance();
    FreshRegistry reg(schema);
    reg.observe(i);
    reg.observe(d);
    const Trigger t = trigger_with_module(d, i, 7);
    const GeneralizedInstance stepped = apply_tgd_step(i, d, t, reg);
    CHECK_THROWS_AS(apply_tgd_step(stepped, d, t, reg), InactiveTrigger);
}

TEST_CASE("apply_egd_step equates a null with a constant") {
    GeneralizedInstance i;
    i.object_kind = ObjectKind::InstanceObject;
    i.insert(Atom{"R", {Term::integer(1), Term::null("a", 1)}});
    i.insert(Atom{"R", {Term::integer(1), Term::integer(2)}});
    const Dependency d = key_egd();
    int applied = 0;
    for (const Trigger& t : find_triggers(d, i)) {
        if (!is_active_trigger(t, d, i)) continue;
        const EgdStepResult r = apply_egd_step(i, d, t);
        REQUIRE(r.kind == EgdStepResult::Kind::NewInstance);
        CHECK(r.instance.atoms ==
              std::set<Atom>{Atom{"R", {Term::integer(1), Term::integer(2)}}});
        CHECK(r.substitution.apply(Term::null("a", 1)) == Term::integer(2));
        ++applied;
    }
    CHECK(applied > 0);
}

TEST_CASE("apply_egd_step fails the instance on two distinct constants") {
    GeneralizedInstance i;
    i.object_kind = ObjectKind::InstanceObject;
    i.insert(Atom{"R", {Term::integer(1), Term::integer(2)}});
    i.insert(Atom{"R", {Term::integer(1), Term::integer(3)}});
    const Dependency d = key_egd();
    bool saw_bottom = false;
    for (const Trigger& t : find_triggers(d, i)) {
        if (!is_active_trigger(t, d, i)) continue;
        if (apply_egd_step(i, d, t).kind == EgdStepResult::Kind::Bottom) saw_bottom = true;
    }
    CHECK(saw_bottom);
}

TEST_CASE("apply_egd_step lets the universal variable survive an existential") {
    GeneralizedInstance i;
    i.object_kind = ObjectKind::QueryObject;
    i.insert(Atom{"student",
                  {Term::universal("i", 1), Term::text("A"), Term::existential("c", 1)}});
    i.insert(Atom{"student",
                  {Term::universal("i", 1), Term::text("A"), Term::universal("c", 1)}});

    Dependency d;
    d.id = "d1";
    d.body = {
        Atom{"student",
             {Term::universal("id", 1), Term::universal("name", 1),
              Term::universal("course", 1)}},
        Atom{"student",
             {Term::universal("id", 1), Term::universal("name", 1),
              Term::universal("course", 2)}},
    };
    d.head = EgdHead{Term::universal("course", 1), Term::universal("course", 2)};

    bool merged = false;
    for (const Trigger& t : find_triggers(d, i)) {
        if (!is_active_trigger(t, d, i)) continue;
        const EgdStepResult r = apply_egd_step(i, d, t);
        REQUIRE(r.kind == EgdStepResult::Kind::NewInstance);
        CHECK(r.instance.atoms ==
              std::set<Atom>{Atom{"student",
                                  {Term::universal("i", 1), Term::text("A"),
                                   Term::universal("c", 1)}}});
        CHECK(r.substitution.apply(Term::existential("c", 1)) == Term::universal("c", 1));
        merged = true;
        break;
    }
    CHECK(merged);
}

TEST_CASE("chase reproduces the demo run in two steps") {
    const Schema schema = demo_schema();
    const ChaseOutcome out = chase({demo_tgd()}, demo_instance(), 100, std::nullopt, &schema);
    CHECK(out.status == ChaseStatus::Fixpoint);
    CHECK(out.steps == 2);
    // all-s-t run: the result is the target instance
    const std::set<Atom> expected{
        Atom{"grade",
             {Term::integer(2), Term::integer(3), Term::null("semester", 2),
              Term::null("score", 1)}},
        Atom{"grade",
             {Term::integer(7), Term::integer(3), Term::null("semester", 3),
              Term::null("score", 2)}},
    };
    CHECK(out.result.atoms == expected);
    REQUIRE(out.log.entries.size() == 2);
    CHECK(out.log.entries[0].action == StepAction::AddedAtoms);
    CHECK(out.log.entries[1].action == StepAction::AddedAtoms);
}

TEST_CASE("chase with no dependencies is an immediate fixpoint") {
    const GeneralizedInstance i = demo_instance();
    const ChaseOutcome out = chase({}, i, 100);
    CHECK(out.status == ChaseStatus::Fixpoint);
    CHECK(out.steps == 0);
    CHECK(out.result == i);
}

TEST_CASE("chase hits the step limit on the cyclic tgd") {
    Schema schema{{{"R", {"a", "b"}}}};
    Dependency d;
    d.id = "d1";
    d.body = {Atom{"R", {Term::universal("x", 1), Term::universal("y", 1)}}};
    d.head = std::vector<Atom>{
        Atom{"R", {Term::universal("y", 1), Term::existential("z", 1)}}};
    GeneralizedInstance i;
    i.insert(Atom{"R", {Term::integer(1), Term::integer(2)}});

    const ChaseOutcome out = chase({d}, i, 10, std::nullopt, &schema);
    CHECK(out.status == ChaseStatus::StepLimit);
    CHECK(out.steps == 10);
    CHECK(out.log.entries.size() == 10);
}

TEST_CASE("chase fails an instance and empties a query on constant conflicts") {
    const Dependency d = key_egd();
    Schema schema{{{"R", {"a", "b"}}}};

    GeneralizedInstance instance;
    instance.object_kind = ObjectKind::InstanceObject;
    instance.insert(Atom{"R", {Term::integer(1), Term::integer(2)}});
    instance.insert(Atom{"R", {Term::integer(1), Term::integer(3)}});
    const ChaseOutcome failed = chase({d}, instance, 100, std::nullopt, &schema);
    CHECK(failed.status == ChaseStatus::FailedBottom);
    REQUIRE(!failed.log.entries.empty());
    CHECK(failed.log.entries.back().action == StepAction::Conflict);

    GeneralizedInstance query;
    query.object_kind = ObjectKind::QueryObject;
    query.insert(Atom{"R", {Term::universal("x", 1), Term::integer(2)}});
    query.insert(Atom{"R", {Term::universal("x", 1), Term::integer(3)}});
    const Atom head{std::string(kAnswerRelation), {Term::universal("x", 1)}};
    const ChaseOutcome emptied = chase({d}, query, 100, head, &schema);
    CHECK(emptied.status == ChaseStatus::EmptyQuery);
}

TEST_CASE("chase on a query accumulates the head substitution") {
    Schema schema{{{"student", {"id", "name", "course"}}}};
    Dependency d;
    d.id = "d1";
    d.body = {
        Atom{"student",
             {Term::universal("id", 1), Term::universal("name", 1),
              Term::universal("course", 1)}},
        Atom{"student",
             {Term::universal("id", 1), Term::universal("name", 1),
              Term::universal("course", 2)}},
    };
    d.head = EgdHead{Term::universal("course", 1), Term::universal("course", 2)};

    GeneralizedInstance query;
    query.object_kind = ObjectKind::QueryObject;
    query.insert(Atom{"student",
                      {Term::universal("i", 1), Term::text("A"), Term::existential("c", 1)}});
    query.insert(Atom{"student",
                      {Term::universal("i", 1), Term::text("A"), Term::universal("c", 1)}});
    const Atom head{std::string(kAnswerRelation), {Term::universal("i", 1)}};

    const ChaseOutcome out = chase({d}, query, 100, head, &schema);
    CHECK(out.status == ChaseStatus::Fixpoint);
    CHECK(out.steps == 1);
    CHECK(out.accumulated.apply(Term::existential("c", 1)) == Term::universal("c", 1));
    REQUIRE(out.query.has_value());
    CHECK(out.query->body ==
          std::vector<Atom>{Atom{"student",
                                 {Term::universal("i", 1), Term::text("A"),
                                  Term::universal("c", 1)}}});
    CHECK(out.query->head == head);
}

TEST_CASE("fixpoints have no active triggers and re-chase in zero steps") {
    Rng rng(211);
    int fixpoints = 0;
    for (int k = 0; k < 60; ++k) {
        const Schema schema = testing::random_schema(rng);
        const GeneralizedInstance i = testing::random_instance(rng, schema, 5);
        const auto sigma = testing::random_dependency_set(rng, schema, 2, 1);
        ChaseOutcome out;
        try {
            out = chase(sigma, i, 60, std::nullopt, &schema);
        } catch (const ValidationError&) {
            continue;
        }
        if (out.status != ChaseStatus::Fixpoint) continue;
        ++fixpoints;
        for (const Dependency& d : sigma)
            for (const Trigger& t : testing::brute_force_triggers(d, out.result))
                CHECK(!testing::brute_force_active(t, d, out.result));
        const ChaseOutcome again = chase(sigma, out.result, 60, std::nullopt, &schema);
        CHECK(again.status == ChaseStatus::Fixpoint);
        CHECK(again.steps == 0);
        CHECK(again.result == out.result);
    }
    CHECK(fixpoints >= 20);
}

TEST_CASE("shuffled dependency order gives homomorphically equivalent results") {
    Rng rng(223);
    int compared = 0;
    for (int k = 0; k < 40 && compared < 15; ++k) {
        const Schema schema = testing::random_schema(rng);
        const GeneralizedInstance i = testing::random_instance(rng, schema, 5);
        auto sigma = testing::random_dependency_set(rng, schema, 3, 1);
        ChaseOutcome a;
        try {
            a = chase(sigma, i, 80, std::nullopt, &schema);
        } catch (const ValidationError&) {
            continue;
        }
        if (a.status != ChaseStatus::Fixpoint) continue;
        std::shuffle(sigma.begin(), sigma.end(), rng.engine);
        const ChaseOutcome b = chase(sigma, i, 80, std::nullopt, &schema);
        if (b.status != ChaseStatus::Fixpoint) continue;
        CHECK(instance_hom_exists(a.result, b.result));
        CHECK(instance_hom_exists(b.result, a.result));
        ++compared;
    }
    CHECK(compared >= 10);
}

TEST_CASE("replaying the log from the input reproduces the outcome") {
    const Schema schema = demo_schema();
    const std::vector<Dependency> sigma{demo_tgd()};
    const GeneralizedInstance i0 = demo_instance();
    const ChaseOutcome out = chase(sigma, i0, 100, std::nullopt, &schema);
    const GeneralizedInstance replayed =
        testing::restrict_to_targets(sigma, testing::replay_log(i0, out.log));
    CHECK(replayed == out.result);

    ChaseOutcome from_replay = out;
    from_replay.result = replayed;
    CHECK(render_result(from_replay) == render_result(out));
}

TEST_CASE("log replay agrees on random runs, including egd rewrites") {
    Rng rng(227);
    int replayed_runs = 0;
    for (int k = 0; k < 50; ++k) {
        const Schema schema = testing::random_schema(rng);
        const GeneralizedInstance i0 = testing::random_instance(rng, schema, 5);
        const auto sigma = testing::random_dependency_set(rng, schema, 2, 2);
        ChaseOutcome out;
        try {
            out = chase(sigma, i0, 60, std::nullopt, &schema);
        } catch (const ValidationError&) {
            continue;
        }
        if (out.status != ChaseStatus::Fixpoint) continue;
        const GeneralizedInstance replayed =
            testing::restrict_to_targets(sigma, testing::replay_log(i0, out.log));
        CHECK(replayed == out.result);
        ++replayed_runs;
    }
    CHECK(replayed_runs >= 20);
}

TEST_CASE("tgd-only runs only grow and never fail") {
    Rng rng(229);
    for (int k = 0; k < 40; ++k) {
        const Schema schema = testing::random_schema(rng);
        const GeneralizedInstance i0 = testing::random_instance(rng, schema, 5);
        const auto sigma = testing::random_dependency_set(rng, schema, 3, 0);
        ChaseOutcome out;
        try {
            out = chase(sigma, i0, 60, std::nullopt, &schema);
        } catch (const ValidationError&) {
            continue;
        }
        CHECK(out.status != ChaseStatus::FailedBottom);
        CHECK(out.status != ChaseStatus::EmptyQuery);
        if (out.status == ChaseStatus::Fixpoint) {
            const GeneralizedInstance full = testing::replay_log(i0, out.log);
            for (const Atom& a : i0.atoms) CHECK(full.atoms.count(a) == 1);
        }
    }
}

TEST_CASE("step numbers are consecutive from one") {
    Schema schema{{{"R", {"a", "b"}}}};
    Dependency d;
    d.id = "d1";
    d.body = {Atom{"R", {Term::universal("x", 1), Term::universal("y", 1)}}};
    d.head = std::vector<Atom>{
        Atom{"R", {Term::universal("y", 1), Term::existential("z", 1)}}};
    GeneralizedInstance i;
    i.insert(Atom{"R", {Term::integer(1), Term::integer(2)}});
    const ChaseOutcome out = chase({d}, i, 5, std::nullopt, &schema);
    REQUIRE(out.log.entries.size() == 5);
    for (std::size_t k = 0; k < out.log.entries.size(); ++k)
        CHECK(out.log.entries[k].step == static_cast<int>(k + 1));
}

TEST_CASE("steps refuse to smuggle wrong term kinds into the object") {
    // unvalidated dependency: a head variable the body never binds
    Dependency bad;
    bad.id = "d1";
    bad.body = {Atom{"R", {Term::universal("x", 1)}}};
    bad.head = std::vector<Atom>{
        Atom{"S", {Term::universal("x", 1), Term::universal("y", 1)}}};
    GeneralizedInstance i;
    i.insert(Atom{"R", {Term::integer(1)}});
    FreshRegistry reg;
    reg.observe(i);
    const auto triggers = find_triggers(bad, i);
    REQUIRE(triggers.size() == 1);
    CHECK_THROWS_AS(apply_tgd_step(i, bad, triggers[0], reg), ValidationError);
}

TEST_CASE("chase validates its inputs") {
    Schema schema{{{"R", {"a"}}, {"S", {"a", "b"}}}};
    Dependency bad;
    bad.id = "d1";
    bad.body = {Atom{"R", {Term::universal("x", 1)}}};
    bad.head = std::vector<Atom>{
        Atom{"S", {Term::universal("x", 1), Term::universal("y", 1)}}};  // y uncovered
    GeneralizedInstance i;
    i.insert(Atom{"R", {Term::integer(1)}});
    CHECK_THROWS_AS(chase({bad}, i, 10, std::nullopt, &schema), ValidationError);
    CHECK_THROWS_AS(chase({}, i, 0), ValidationError);
}
