"""
Human-agreement packaging and scoring
=====================================

Packs assigned records into a labeling session (the assigned texture plus
three shuffled distractors per item), simulates two annotators, and scores
their agreement with the assignments. A perfectly agreeing annotator hits
1.0; a uniform guesser converges on 0.25.
"""

from texturebias import humaneval, synth, tav, tid

world = synth.PlantedWorld(mapping={i: i for i in range(10)}, noise=0.05,
                           samples_per_texture=200, images_per_object=40,
                           seed=11)
reg = synth.registry_for(world)
T = tav.tav(tav.count_matrix(synth.gen_texture_records(world), reg))
assignments = list(tid.batch_assign(synth.gen_image_records(world), T))

# Package 200 of the 400 records. Everything downstream is reproducible
# from the seed, including distractor choice and option order.
package = humaneval.pack(assignments, None, count=200, seed=99, reg=reg)
print(f"package {package.package_id}: {len(package.items)} items")
item = package.items[0]
print(f"sample item {item.record_id}: options "
      f"{[package.texture_names[t] for t in item.options]}")
print("(the position of the assigned texture stays hidden from display)\n")

# Annotator one follows the assigned texture on 7 of every 10 items and
# picks two options on each item they are unsure about.
selections = {}
for k, it in enumerate(package.items):
    if k % 10 < 7:
        selections[it.record_id] = (it.tid_option_index,)
    else:
        wrong = (it.tid_option_index + 1) % 4
        also_wrong = (it.tid_option_index + 2) % 4
        selections[it.record_id] = tuple(sorted((wrong, also_wrong)))
careful = humaneval.EvalResponse(package.package_id, selections)
report = humaneval.score(package, careful)
print(f"careful annotator: {report.agreeing}/{report.answered} "
      f"agree -> rate {report.overall_rate:.2f}")
for texture_id, t in list(report.per_texture.items())[:3]:
    print(f"  {package.texture_names[texture_id]}: "
          f"{t.agreeing}/{t.answered} ({t.rate:.2f})")

# Annotator two guesses uniformly; agreement collapses to chance level.
guesser = humaneval.simulate_uniform_responses(package, seed=5)
baseline = humaneval.score(package, guesser)
print(f"\nuniform guesser: rate {baseline.overall_rate:.2f} "
      f"(chance is 0.25)")
