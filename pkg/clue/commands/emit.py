"""`clue emit`: masks and the two-stage schedule"""
import logging
from pathlib import Path

import click

from clue.commands import settings, write_result
from clue.services.masks import CONFLICT_STAGE, FORGET_STAGE, MASK_FILES, ScheduleConfig, emit_masks, \
    emit_schedule, parse_forget_losses, provenance
from clue.utils import sha256_text, write_json
from clue.validation import LayoutSchema, ReportSchema, ScheduleConfigSchema, load_document, validate_input

logger = logging.getLogger(__name__)

SCHEDULE_FILE = 'schedule.json'


@click.command('emit')
@click.option('--report', 'report', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--layout', 'layout', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--schedule-config', 'schedule_config', default=None, type=click.Path(exists=True, dir_okay=False),
              help='Schedule hyperparameters JSON; flags below override it')
@click.option('--stage-one-epochs', type=click.IntRange(min=1), default=None)
@click.option('--stage-two-epochs', type=click.IntRange(min=1), default=None)
@click.option('--lambda', 'retain_weight', type=float, default=None, help='Retain loss weight of stage two')
@click.option('--learning-rate', type=float, default=None)
@click.option('--optimizer', default=None)
@click.option('--stage-order', default=None, help='Comma-separated stage names, e.g. forget,conflict')
@click.option('--forget-loss', 'forget_loss', default=None,
              help='Forget loss per stage, e.g. PO+PO or GA+PO (PO, GA or NPO)')
@validate_input(ReportSchema, 'report')
@validate_input(LayoutSchema, 'layout')
@click.pass_context
def emit_command(ctx, report, layout, schedule_config, stage_one_epochs, stage_two_epochs, retain_weight,
                 learning_rate, optimizer, stage_order, forget_loss):
    """Write masks_forget.json, masks_conflict.json and schedule.json into --output."""
    obj = settings(ctx)
    base = load_document(ScheduleConfigSchema, schedule_config, 'schedule_config') if schedule_config \
        else ScheduleConfig()
    overrides = {
        'stage_one_epochs': stage_one_epochs,
        'stage_two_epochs': stage_two_epochs,
        'retain_weight': retain_weight,
        'learning_rate': learning_rate,
        'optimizer': optimizer,
        'stage_order': [name.strip() for name in stage_order.split(',')] if stage_order else None,
    }
    if forget_loss:
        overrides['stage_one_loss'], overrides['stage_two_loss'] = parse_forget_losses(forget_loss)
    values = {
        'stage_one_epochs': base.stage_one_epochs,
        'stage_two_epochs': base.stage_two_epochs,
        'retain_weight': base.retain_weight,
        'learning_rate': base.learning_rate,
        'optimizer': base.optimizer,
        'stage_order': list(base.stage_order),
        'stage_one_loss': base.stage_one_loss,
        'stage_two_loss': base.stage_two_loss,
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    config = ScheduleConfig(**values)

    header = provenance(obj.get('inputs', {}), obj['seed'])
    forget_mask, conflict_mask = emit_masks(report, layout, header)
    schedule = emit_schedule((forget_mask, conflict_mask), config, header)

    out_dir = Path(obj.get('output') or '.')
    out_dir.mkdir(parents=True, exist_ok=True)
    documents = {
        MASK_FILES[FORGET_STAGE]: forget_mask.to_dict(),
        MASK_FILES[CONFLICT_STAGE]: conflict_mask.to_dict(),
        SCHEDULE_FILE: schedule.to_dict(),
    }
    written = {name: sha256_text(write_json(out_dir / name, document)) for name, document in documents.items()}
    logger.info(f"Wrote {len(written)} files to {out_dir}")

    coverage = {'M_f': forget_mask.coverage(layout), 'M_c': conflict_mask.coverage(layout)}
    data = {'directory': str(out_dir), 'files': written, 'masks': schedule.masks, 'coverage': coverage}
    write_result(ctx, data, f"M_f {forget_mask.index_count} indices, M_c {conflict_mask.index_count} indices, "
                            f"schedule {config.stage_one_epochs}+{config.stage_two_epochs} epochs "
                            f"({config.stage_one_loss.value}+{config.stage_two_loss.value}) -> {out_dir}",
                 to_output=False)
